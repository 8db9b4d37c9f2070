#include "memwave/simulation.hpp"

namespace memwave {

namespace {

class DafermosRun final : public Simulation {
 public:
  DafermosRun(const DiscreteOperators& ops, const Kernel& k, const HistoryGrid& grid, double dt,
              const InitialData& init, const PastHistory& past)
      : model_(ops, k, grid), stepper_(model_.generator()), dt_(dt),
        x_(model_.pack(model_.initial_state(init, past))) {}

  void step() override {
    x_ = stepper_.step(x_, dt_);
    ++n_;
  }
  double time() const override { return n_ * dt_; }
  Vector displacement() const override { return x_.head(model_.n()); }
  EnergyParts energy() const override { return energy_parts(model_, model_.unpack(x_)); }
  std::string formulation() const override { return "dafermos"; }

 private:
  DafermosModel model_;
  MidpointStepper stepper_;
  double dt_;
  Vector x_;
  long n_ = 0;
};

class PronyRun final : public Simulation {
 public:
  PronyRun(const DiscreteOperators& ops, const Kernel& k, double dt, const InitialData& init,
           const PastHistory& past)
      : model_(ops, k), stepper_(model_.generator()), dt_(dt), x_(model_.initial_state(init, past)) {}

  void step() override {
    x_ = stepper_.step(x_, dt_);
    ++n_;
  }
  double time() const override { return n_ * dt_; }
  Vector displacement() const override { return x_.head(model_.n()); }
  EnergyParts energy() const override {
    return {model_.paper_energy(x_), model_.hilbert_energy(x_), model_.dissipation(x_)};
  }
  std::string formulation() const override { return "prony"; }

 private:
  PronyModel model_;
  MidpointStepper stepper_;
  double dt_;
  Vector x_;
  long n_ = 0;
};

class ConvolutionRun final : public Simulation {
 public:
  ConvolutionRun(const DiscreteOperators& ops, const Kernel& k, double s_max, double dt,
                 const InitialData& init, const PastHistory& past)
      : solver_(ops, k, s_max, dt, init, past) {}

  void step() override { solver_.step(); }
  double time() const override { return solver_.time(); }
  Vector displacement() const override { return solver_.u(); }
  EnergyParts energy() const override {
    return {solver_.paper_energy(), solver_.hilbert_energy(), solver_.dissipation()};
  }
  std::string formulation() const override { return "convolution"; }

 private:
  ConvolutionSolver solver_;
};

}  // namespace

std::unique_ptr<Simulation> make_simulation(const std::string& formulation,
                                            const DiscreteOperators& ops, const Kernel& kernel,
                                            const HistoryGrid& grid, double dt,
                                            const InitialData& init, const PastHistory& past) {
  if (formulation == "dafermos") {
    return std::make_unique<DafermosRun>(ops, kernel, grid, dt, init, past);
  }
  if (formulation == "prony") return std::make_unique<PronyRun>(ops, kernel, dt, init, past);
  if (formulation == "convolution") {
    return std::make_unique<ConvolutionRun>(ops, kernel, grid.s_max, dt, init, past);
  }
  throw ConfigError("unknown formulation '" + formulation + "'");
}

}  // namespace memwave
