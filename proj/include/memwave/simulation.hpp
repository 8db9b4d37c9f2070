#pragma once

#include <memory>
#include <string>

#include "memwave/dynamics.hpp"
#include "memwave/energy.hpp"

namespace memwave {

/// Uniform stepping interface over the three formulations.
class Simulation {
 public:
  virtual ~Simulation() = default;
  virtual void step() = 0;
  virtual double time() const = 0;
  virtual Vector displacement() const = 0;
  virtual EnergyParts energy() const = 0;
  virtual std::string formulation() const = 0;
};

/// formulation: dafermos | convolution | prony. The convolution leg truncates
/// its memory at grid.s_max.
std::unique_ptr<Simulation> make_simulation(const std::string& formulation,
                                            const DiscreteOperators& ops, const Kernel& kernel,
                                            const HistoryGrid& grid, double dt,
                                            const InitialData& init, const PastHistory& past);

}  // namespace memwave
