#include "freespec/sweep.hpp"

#include <exception>

#include "freespec/error.hpp"

namespace freespec {

namespace {

void evaluate_point(const PointFunction& fn, Complex z, PointValue& out,
                    std::exception_ptr& failure) {
    try {
        out.value = fn(z);
        out.status = PointStatus::Ok;
    } catch (const ConditioningError&) {
        out.value = Complex(0.0, 0.0);
        out.status = PointStatus::IllConditioned;
    } catch (...) {
        failure = std::current_exception();
    }
}

void rethrow_first(const std::vector<std::exception_ptr>& failures) {
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
}

}  // namespace

std::vector<PointValue> sweep_parallel(std::span<const Complex> points, const PointFunction& fn) {
    const auto n = static_cast<long>(points.size());
    std::vector<PointValue> out(points.size());
    std::vector<std::exception_ptr> failures(points.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (long i = 0; i < n; ++i) evaluate_point(fn, points[i], out[i], failures[i]);
    rethrow_first(failures);
    return out;
}

std::vector<PointValue> sweep_serial(std::span<const Complex> points, const PointFunction& fn) {
    std::vector<PointValue> out(points.size());
    std::vector<std::exception_ptr> failures(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        evaluate_point(fn, points[i], out[i], failures[i]);
    rethrow_first(failures);
    return out;
}

}  // namespace freespec
