#pragma once

// Synthetic multichannel measurements from the linear sensitivity model
// V = Xi * P: P is white noise plus injected events (step, ramp, or a chaos
// proxy that inflates the noise variance on every channel), Xi a fixed
// random mixing matrix.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "freespec/randmat.hpp"

namespace freespec {

struct GridModel {
    Eigen::Index n_channels = 0;
    Matrix mixing;  // Xi, N x N
    double noise_sigma = 1.0;
};

/// Xi = I + conditioning * R / sqrt(n), R i.i.d. N(0, 1) from `seed`.
/// Throws InvalidArgument if Xi has condition number >= 1e10.
GridModel build_model(Eigen::Index n, std::uint64_t seed, double conditioning,
                      double noise_sigma = 1.0);

double condition_number(const Matrix& m);

enum class EventKind { None, Step, Ramp, Chaos };

std::string_view to_string(EventKind kind);
EventKind parse_event_kind(std::string_view text);

struct ScenarioEvent {
    EventKind kind = EventKind::None;
    Eigen::Index channel = 0;  // step and ramp only
    long start_t = 0;          // inclusive
    long end_t = 0;            // inclusive
    /// Step height, ramp slope per sample, or chaos variance multiplier.
    double amplitude = 0.0;
};

/// Noise is drawn for the whole horizon before any event is applied, so
/// removing events leaves the noise stream bit-identical.
///   step:  + amplitude on the channel for t in [start_t, end_t]
///   ramp:  + amplitude * (t - start_t + 1) on the channel over the same range
///   chaos: noise scaled by sqrt(amplitude) on all channels over the range
MeasurementWindow simulate(const GridModel& model, long total_t,
                           const std::vector<ScenarioEvent>& events, std::uint64_t seed);

struct Scenario {
    Eigen::Index n = 118;
    long total_t = 118;
    double noise_sigma = 1.0;
    double conditioning = 0.0;
    std::uint64_t seed = 0;
    // Noise realization; unset reuses `seed`. Lets a reference and a test
    // window share one grid model with independent noise.
    std::optional<std::uint64_t> noise_seed;
    std::vector<ScenarioEvent> events;
};

/// Builds the model from (n, seed, conditioning) and simulates with the
/// noise substream of noise_seed (default: seed).
MeasurementWindow simulate(const Scenario& scenario);

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const Scenario& scenario);

}  // namespace freespec
