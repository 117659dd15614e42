#include "freespec/gridsim.hpp"

#include <cmath>

#include <fmt/format.h>

#include "freespec/error.hpp"
#include "freespec/rng.hpp"

namespace freespec {

double condition_number(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    return s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : INFINITY;
}

GridModel build_model(Eigen::Index n, std::uint64_t seed, double conditioning, double noise_sigma) {
    if (n < 2) throw InvalidArgument(fmt::format("grid model needs n >= 2, got {}", n));
    if (!(conditioning >= 0.0) || !std::isfinite(conditioning))
        throw InvalidArgument(fmt::format("conditioning must be >= 0, got {}", conditioning));
    if (!(noise_sigma > 0.0) || !std::isfinite(noise_sigma))
        throw InvalidArgument(fmt::format("noise_sigma must be > 0, got {}", noise_sigma));
    GridModel model;
    model.n_channels = n;
    model.noise_sigma = noise_sigma;
    model.mixing = Matrix::Identity(n, n);
    if (conditioning > 0.0) {
        Matrix r(n, n);
        Engine engine = substream(seed, 0);
        fill_gaussian(r, engine);
        model.mixing += (conditioning / std::sqrt(double(n))) * r;
        const double cond = condition_number(model.mixing);
        if (!(cond < 1e10))
            throw InvalidArgument(fmt::format("mixing matrix is near singular (cond {:.3g})", cond));
    }
    return model;
}

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Step: return "step";
        case EventKind::Ramp: return "ramp";
        case EventKind::Chaos: return "chaos";
        default: return "none";
    }
}

EventKind parse_event_kind(std::string_view text) {
    if (text == "none") return EventKind::None;
    if (text == "step") return EventKind::Step;
    if (text == "ramp") return EventKind::Ramp;
    if (text == "chaos") return EventKind::Chaos;
    throw InvalidArgument(fmt::format("unknown event kind '{}'", text));
}

MeasurementWindow simulate(const GridModel& model, long total_t,
                           const std::vector<ScenarioEvent>& events, std::uint64_t seed) {
    const auto n = model.n_channels;
    if (model.mixing.rows() != n || model.mixing.cols() != n)
        throw InvalidArgument("grid model mixing matrix does not match its channel count");
    if (total_t < n)
        throw InvalidArgument(fmt::format("total_t = {} is shorter than N = {}", total_t, n));
    for (const auto& e : events) {
        if (e.start_t < 0 || e.end_t < e.start_t || e.end_t >= total_t)
            throw InvalidArgument(fmt::format("event range [{}, {}] outside [0, {})", e.start_t,
                                              e.end_t, total_t));
        const bool localized = e.kind == EventKind::Step || e.kind == EventKind::Ramp;
        if (localized && (e.channel < 0 || e.channel >= n))
            throw InvalidArgument(fmt::format("event channel {} outside [0, {})", e.channel, n));
        if (e.kind == EventKind::Chaos && !(e.amplitude > 0.0))
            throw InvalidArgument("chaos variance multiplier must be > 0");
    }

    Matrix noise(n, total_t);
    Engine engine = substream(seed, 1);
    fill_gaussian(noise, engine);
    noise *= model.noise_sigma;

    for (const auto& e : events)
        if (e.kind == EventKind::Chaos)
            noise.middleCols(e.start_t, e.end_t - e.start_t + 1) *= std::sqrt(e.amplitude);
    Matrix p = std::move(noise);
    for (const auto& e : events) {
        if (e.kind == EventKind::Step) {
            p.row(e.channel).segment(e.start_t, e.end_t - e.start_t + 1).array() += e.amplitude;
        } else if (e.kind == EventKind::Ramp) {
            for (long t = e.start_t; t <= e.end_t; ++t)
                p(e.channel, t) += e.amplitude * double(t - e.start_t + 1);
        }
    }
    return MeasurementWindow(model.mixing * p);
}

MeasurementWindow simulate(const Scenario& scenario) {
    const auto model = build_model(scenario.n, scenario.seed, scenario.conditioning,
                                   scenario.noise_sigma);
    return simulate(model, scenario.total_t, scenario.events,
                    scenario.noise_seed.value_or(scenario.seed));
}

Scenario scenario_from_json(const nlohmann::json& j) {
    try {
        Scenario s;
        s.n = j.at("n").get<Eigen::Index>();
        s.total_t = j.at("total_t").get<long>();
        s.noise_sigma = j.value("noise_sigma", 1.0);
        s.conditioning = j.value("conditioning", 0.0);
        s.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("noise_seed")) s.noise_seed = j.at("noise_seed").get<std::uint64_t>();
        for (const auto& ev : j.value("events", nlohmann::json::array())) {
            ScenarioEvent e;
            e.kind = parse_event_kind(ev.at("kind").get<std::string>());
            e.channel = ev.value("channel", Eigen::Index{0});
            e.start_t = ev.value("start_t", 0L);
            e.end_t = ev.value("end_t", s.total_t - 1);
            e.amplitude = ev.value("amplitude", 0.0);
            s.events.push_back(e);
        }
        return s;
    } catch (const nlohmann::json::exception& ex) {
        throw InvalidArgument(fmt::format("malformed scenario: {}", ex.what()));
    }
}

nlohmann::ordered_json to_json(const Scenario& scenario) {
    nlohmann::ordered_json j;
    j["n"] = scenario.n;
    j["total_t"] = scenario.total_t;
    j["noise_sigma"] = scenario.noise_sigma;
    j["conditioning"] = scenario.conditioning;
    j["seed"] = scenario.seed;
    if (scenario.noise_seed) j["noise_seed"] = *scenario.noise_seed;
    auto events = nlohmann::ordered_json::array();
    for (const auto& e : scenario.events) {
        nlohmann::ordered_json ev;
        ev["kind"] = to_string(e.kind);
        ev["channel"] = e.channel;
        ev["start_t"] = e.start_t;
        ev["end_t"] = e.end_t;
        ev["amplitude"] = e.amplitude;
        events.push_back(std::move(ev));
    }
    j["events"] = std::move(events);
    return j;
}

}  // namespace freespec
