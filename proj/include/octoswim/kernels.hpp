#pragma once

#include <span>

#include "octoswim/arm.hpp"

namespace octoswim {

enum class Execution { serial, parallel };

/// One time step for a set of independent arms sharing a model.
/// `out[i]` receives the step of arm i; results are identical for both
/// execution modes. The first failing arm (lowest index) is rethrown.
void step_arms_serial(const ArmModel& model, std::span<const ArmState> states,
                      std::span<const RootDrive> drives, std::span<const AmbientFlow> ambient,
                      const FluidEnvironment& env, double dt, std::span<ArmStep> out);

void step_arms_parallel(const ArmModel& model, std::span<const ArmState> states,
                        std::span<const RootDrive> drives, std::span<const AmbientFlow> ambient,
                        const FluidEnvironment& env, double dt, std::span<ArmStep> out);

void step_arms(Execution exec, const ArmModel& model, std::span<const ArmState> states,
               std::span<const RootDrive> drives, std::span<const AmbientFlow> ambient,
               const FluidEnvironment& env, double dt, std::span<ArmStep> out);

}  // namespace octoswim
