#include "octoswim/kernels.hpp"

#include <omp.h>

#include <cstddef>
#include <exception>
#include <stdexcept>
#include <vector>

namespace octoswim {

namespace {

void check_sizes(std::span<const ArmState> states, std::span<const RootDrive> drives,
                 std::span<const AmbientFlow> ambient, std::span<ArmStep> out) {
    if (drives.size() != states.size() || ambient.size() != states.size() || out.size() != states.size()) {
        throw std::invalid_argument("arm batch spans differ in length");
    }
}

}  // namespace

void step_arms_serial(const ArmModel& model, std::span<const ArmState> states,
                      std::span<const RootDrive> drives, std::span<const AmbientFlow> ambient,
                      const FluidEnvironment& env, double dt, std::span<ArmStep> out) {
    check_sizes(states, drives, ambient, out);
    for (std::size_t i = 0; i < states.size(); ++i) {
        out[i] = step_arm_with_loads(model, states[i], drives[i], env, ambient[i], dt);
    }
}

void step_arms_parallel(const ArmModel& model, std::span<const ArmState> states,
                        std::span<const RootDrive> drives, std::span<const AmbientFlow> ambient,
                        const FluidEnvironment& env, double dt, std::span<ArmStep> out) {
    check_sizes(states, drives, ambient, out);
    const auto n = static_cast<std::ptrdiff_t>(states.size());
    std::vector<std::exception_ptr> errors(states.size());

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        try {
            out[ui] = step_arm_with_loads(model, states[ui], drives[ui], env, ambient[ui], dt);
        } catch (...) {
            errors[ui] = std::current_exception();
        }
    }

    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

void step_arms(Execution exec, const ArmModel& model, std::span<const ArmState> states,
               std::span<const RootDrive> drives, std::span<const AmbientFlow> ambient,
               const FluidEnvironment& env, double dt, std::span<ArmStep> out) {
    if (exec == Execution::parallel && omp_get_max_threads() > 1 && !omp_in_parallel()) {
        step_arms_parallel(model, states, drives, ambient, env, dt, out);
    } else {
        step_arms_serial(model, states, drives, ambient, env, dt, out);
    }
}

}  // namespace octoswim
