#include "memwave/dynamics.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

namespace memwave {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void add_block(Triplets& t, const SparseMatrix& B, int row0, int col0, double scale) {
  for (int c = 0; c < B.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(B, c); it; ++it) {
      t.emplace_back(row0 + it.row(), col0 + it.col(), scale * it.value());
    }
  }
}

void add_identity(Triplets& t, int n, int row0, int col0, double scale) {
  for (int i = 0; i < n; ++i) t.emplace_back(row0 + i, col0 + i, scale);
}

SparseMatrix from_triplets(int dim, const Triplets& t) {
  SparseMatrix A(dim, dim);
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  return A;
}

double quad_form(const SparseMatrix& A, const Vector& x) { return x.dot(A * x); }

}  // namespace

Vector GeneratorMatrix::apply(const Vector& x) const {
  if (x.size() != dimension()) throw ShapeError("generator: state has wrong dimension");
  Vector y = J * x;
  y.segment(n_u, n_u) = mass_solver->solve(Vector(y.segment(n_u, n_u)));
  return y;
}

Matrix GeneratorMatrix::dense() const {
  Matrix A = Matrix(J);
  A.middleRows(n_u, n_u) = mass_solver->solve(Matrix(A.middleRows(n_u, n_u)));
  return A;
}

DafermosModel::DafermosModel(DiscreteOperators ops, Kernel kernel, HistoryGrid grid)
    : ops_(std::move(ops)), kernel_(std::move(kernel)), grid_(std::move(grid)),
      ell_(kernel_.residual()) {
  if (kernel_.is_zero() != grid_.empty()) {
    throw ShapeError("history grid does not match the kernel (zero kernels need an empty grid)");
  }
  gen_ = build_generator(*this);
  const int n = this->n();
  Triplets t;
  add_block(t, ops_.K, 0, 0, ell_);
  add_block(t, ops_.M_total, n, n, 1.0);
  for (int k = 0; k < history_nodes(); ++k) {
    add_block(t, ops_.K, (2 + k) * n, (2 + k) * n, grid_.weights[k]);
  }
  gram_ = from_triplets(dimension(), t);
}

GeneratorMatrix build_generator(const DafermosModel& model) {
  const auto& ops = model.ops();
  const auto& grid = model.grid();
  const int n = model.n();
  const int K = model.history_nodes();
  const int dim = model.dimension();

  Triplets e, j;
  add_identity(e, n, 0, 0, 1.0);
  add_block(e, ops.M_total, n, n, 1.0);
  add_identity(e, K * n, 2 * n, 2 * n, 1.0);

  add_identity(j, n, 0, n, 1.0);
  add_block(j, ops.K, n, 0, -model.ell());
  for (int k = 0; k < K; ++k) {
    const int row = (2 + k) * n;
    const double inv = 1.0 / grid.spacing[k];
    add_block(j, ops.K, n, row, -grid.weights[k]);
    add_identity(j, n, row, n, 1.0);
    add_identity(j, n, row, row, -inv);
    if (k > 0) add_identity(j, n, row, row - n, inv);
  }

  GeneratorMatrix g;
  g.E = from_triplets(dim, e);
  g.J = from_triplets(dim, j);
  g.n_u = n;
  g.history_nodes = K;
  g.mass_solver = std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>(ops.M_total);
  return g;
}

void DafermosModel::check(const State& x) const {
  if (x.u.size() != n() || x.v.size() != n() || x.eta.cols() != history_nodes() ||
      (history_nodes() > 0 && x.eta.rows() != n())) {
    throw ShapeError("state does not match the model layout");
  }
}

State DafermosModel::derivative(const State& x) const {
  check(x);
  State d;
  d.u = x.v;
  const Vector force = -ell_ * (ops_.K * x.u) - ops_.K * weighted_history(x.eta, grid_);
  d.v = gen_.mass_solver->solve(force);
  d.eta = transport_apply(x.eta, x.v, grid_);
  if (d.eta.rows() != n()) d.eta.resize(n(), 0);
  return d;
}

Vector DafermosModel::pack(const State& x) const {
  check(x);
  Vector out(dimension());
  const int n = this->n();
  out.head(n) = x.u;
  out.segment(n, n) = x.v;
  for (int k = 0; k < history_nodes(); ++k) out.segment((2 + k) * n, n) = x.eta.col(k);
  return out;
}

State DafermosModel::unpack(const Vector& x) const {
  if (x.size() != dimension()) throw ShapeError("stacked state has wrong dimension");
  const int n = this->n();
  State s;
  s.u = x.head(n);
  s.v = x.segment(n, n);
  s.eta.resize(n, history_nodes());
  for (int k = 0; k < history_nodes(); ++k) s.eta.col(k) = x.segment((2 + k) * n, n);
  return s;
}

State DafermosModel::zero_state() const {
  return {Vector::Zero(n()), Vector::Zero(n()), HistoryField::Zero(n(), history_nodes())};
}

Complex DafermosModel::inner(const CVector& x, const CVector& y) const {
  return x.dot(gram_.cast<Complex>() * y);
}

State DafermosModel::initial_state(const InitialData& init, const PastHistory& past) const {
  State s{init.u, init.v, init_history(past_function(past, ops_.mesh, init.u), ops_.mesh, grid_)};
  check(s);
  return s;
}

MidpointStepper::MidpointStepper(const GeneratorMatrix& gen) : E_(gen.E), J_(gen.J) {}

void MidpointStepper::factorize(double dt) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  const SparseMatrix lhs = E_ - (0.5 * dt) * J_;
  rhs_ = E_ + (0.5 * dt) * J_;
  lu_.analyzePattern(lhs);
  lu_.factorize(lhs);
  if (lu_.info() != Eigen::Success) {
    throw SingularSystemError("midpoint system is singular at dt = " + std::to_string(dt), 0.0);
  }
  dt_ = dt;
}

Vector MidpointStepper::step(const Vector& x, double dt) {
  if (x.size() != E_.rows()) throw ShapeError("midpoint: state has wrong dimension");
  if (dt != dt_) factorize(dt);
  return lu_.solve(rhs_ * x);
}

PronyModel::PronyModel(DiscreteOperators ops, Kernel kernel)
    : ops_(std::move(ops)), kernel_(std::move(kernel)) {
  if (kernel_.family() != KernelFamily::exponential) {
    throw KernelError("Prony formulation needs an exponential kernel");
  }
  const int n = ops_.n();
  const double a = kernel_.amplitude();
  const double b = kernel_.rate();
  Triplets e, j;
  add_identity(e, n, 0, 0, 1.0);
  add_block(e, ops_.M_total, n, n, 1.0);
  add_identity(e, n, 2 * n, 2 * n, 1.0);
  add_identity(j, n, 0, n, 1.0);
  add_block(j, ops_.K, n, 0, -1.0);
  add_block(j, ops_.K, n, 2 * n, 1.0);
  add_identity(j, n, 2 * n, 0, a);
  add_identity(j, n, 2 * n, 2 * n, -b);
  gen_.E = from_triplets(3 * n, e);
  gen_.J = from_triplets(3 * n, j);
  gen_.n_u = n;
  gen_.mass_solver = std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>(ops_.M_total);
}

Vector PronyModel::initial_memory(const InitialData& init, const PastHistory& past) const {
  return past.amplitude * past_weight(kernel_, 0.0, past.rate) * init.u;
}

Vector PronyModel::initial_state(const InitialData& init, const PastHistory& past) const {
  const int n = ops_.n();
  Vector x(3 * n);
  x << init.u, init.v, initial_memory(init, past);
  return x;
}

double PronyModel::hilbert_energy(const Vector& x) const {
  const int n = ops_.n();
  const double g0 = kernel_.total_mass();
  const Vector u = x.head(n), v = x.segment(n, n);
  const Vector zeta = g0 * u - x.tail(n);
  return 0.5 * (kernel_.residual() * quad_form(ops_.K, u) + quad_form(ops_.M_total, v) +
                quad_form(ops_.K, zeta) / g0);
}

double PronyModel::paper_energy(const Vector& x) const {
  const int n = ops_.n();
  const double g0 = kernel_.total_mass();
  const Vector u = x.head(n), v = x.segment(n, n);
  const Vector zeta = g0 * u - x.tail(n);
  return 0.5 * (quad_form(ops_.K, u) + quad_form(ops_.M, v) + quad_form(ops_.K, zeta) / g0);
}

double PronyModel::dissipation(const Vector& x) const {
  const int n = ops_.n();
  const double g0 = kernel_.total_mass();
  const Vector zeta = g0 * x.head(n) - x.tail(n);
  return -(kernel_.rate() / g0) * quad_form(ops_.K, zeta);
}

ConvolutionSolver::ConvolutionSolver(DiscreteOperators ops, Kernel kernel, double s_max, double dt,
                                     const InitialData& init, PastHistory past,
                                     std::optional<std::size_t> capacity)
    : ops_(std::move(ops)), kernel_(std::move(kernel)), past_(std::move(past)), phi_(init.u),
      dt_(dt), u_(init.u), v_(init.v) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (init.u.size() != ops_.n() || init.v.size() != ops_.n()) {
    throw ShapeError("initial data does not match the mesh");
  }
  lags_ = (kernel_.is_zero() || s_max <= 0.0)
              ? 0
              : static_cast<int>(std::ceil(s_max / dt - 1e-9));
  const std::size_t needed = static_cast<std::size_t>(lags_) + 1;
  capacity_ = capacity.value_or(needed);
  if (capacity_ < needed) {
    throw Error("insufficient history buffer: " + std::to_string(capacity_) +
                " snapshots cannot cover S_max = " + std::to_string(s_max) + " at dt = " +
                std::to_string(dt) + " (need " + std::to_string(needed) + ")");
  }

  using Gauss = boost::math::quadrature::gauss<double, 10>;
  left_.assign(lags_ + 1, 0.0);
  right_.assign(lags_ + 1, 0.0);
  dleft_.assign(lags_ + 1, 0.0);
  dright_.assign(lags_ + 1, 0.0);
  for (int j = 0; j <= lags_ && lags_ > 0; ++j) {
    const double s = j * dt;
    if (j > 0) {
      const auto up = [&](double x) { return (x - (s - dt)) / dt; };
      left_[j] = Gauss::integrate([&](double x) { return kernel_.value(x) * up(x); }, s - dt, s);
      dleft_[j] =
          Gauss::integrate([&](double x) { return kernel_.derivative(x) * up(x); }, s - dt, s);
    }
    if (j < lags_) {
      const auto down = [&](double x) { return (s + dt - x) / dt; };
      right_[j] = Gauss::integrate([&](double x) { return kernel_.value(x) * down(x); }, s, s + dt);
      dright_[j] =
          Gauss::integrate([&](double x) { return kernel_.derivative(x) * down(x); }, s, s + dt);
    }
  }
  omega0_ = right_[0];

  const SparseMatrix lhs = (2.0 / dt) * ops_.M_total + (0.5 * dt * (1.0 - omega0_)) * ops_.K;
  solver_.compute(lhs);
  mass_solver_.compute(ops_.M_total);
  if (solver_.info() != Eigen::Success || mass_solver_.info() != Eigen::Success) {
    throw SingularSystemError("convolution step matrix is not positive definite", 0.0);
  }
  buffer_.push_front(u_);
  m_current_ = memory_term();
}

const Vector& ConvolutionSolver::snapshot(long n) const {
  return buffer_[static_cast<std::size_t>(step_ - n)];
}

Vector ConvolutionSolver::known_memory(long n) const {
  // lags 1..min(n, L) of m(t_n); snapshot n - j must already be stored
  Vector m = Vector::Zero(ops_.n());
  if (lags_ == 0) return m;
  const long last = std::min<long>(n, lags_);
  for (long j = 1; j <= last; ++j) {
    const double w = left_[j] + ((j < n && j < lags_) ? right_[j] : 0.0);
    m.noalias() += w * snapshot(n - j);
  }
  if (n <= lags_ && past_.amplitude != 0.0) {
    m += past_.amplitude * past_weight(kernel_, n * dt_, past_.rate) * phi_;
  }
  return m;
}

Vector ConvolutionSolver::memory_term() const {
  Vector m = known_memory(step_);
  if (step_ > 0) m += omega0_ * u_;
  return m;
}

void ConvolutionSolver::step() {
  const Vector m_known = known_memory(step_ + 1);
  const Vector Ku = ops_.K * u_;
  const Vector rhs = (2.0 / dt_) * (ops_.M_total * u_) + 2.0 * (ops_.M_total * v_) -
                     (0.5 * dt_) * Ku + (0.5 * dt_) * (ops_.K * (m_current_ + m_known));
  const Vector u_next = solver_.solve(rhs);
  v_ = (2.0 / dt_) * (u_next - u_) - v_;
  u_ = u_next;
  m_current_ = omega0_ * u_ + m_known;
  ++step_;
  buffer_.push_front(u_);
  while (buffer_.size() > capacity_) buffer_.pop_back();
}

std::pair<Vector, Vector> ConvolutionSolver::derivative() const {
  const Vector force = -(ops_.K * u_) + ops_.K * m_current_;
  return {v_, mass_solver_.solve(force)};
}

double ConvolutionSolver::history_quadratic(bool derivative) const {
  if (lags_ == 0) return 0.0;
  const auto& L = derivative ? dleft_ : left_;
  const auto& R = derivative ? dright_ : right_;
  const long n = step_;
  double sum = 0.0;
  const long last = std::min<long>(n, lags_);
  for (long j = 1; j <= last; ++j) {
    const double w = L[j] + ((j < n && j < lags_) ? R[j] : 0.0);
    sum += w * quad_form(ops_.K, u_ - snapshot(n - j));
  }
  if (n <= lags_) {
    // s > t_n: eta(s) = u_n - c exp(-r (s - t_n)) phi
    const double t = n * dt_;
    const double c = past_.amplitude;
    const double r = past_.rate;
    const double p0 = past_weight(kernel_, t, 0.0, derivative);
    const double p1 = c == 0.0 ? 0.0 : past_weight(kernel_, t, r, derivative);
    const double p2 = c == 0.0 ? 0.0 : past_weight(kernel_, t, 2.0 * r, derivative);
    const Vector Ku = ops_.K * u_;
    sum += p0 * u_.dot(Ku) - 2.0 * c * p1 * phi_.dot(Ku) + c * c * p2 * quad_form(ops_.K, phi_);
  }
  return sum;
}

double ConvolutionSolver::hilbert_energy() const {
  return 0.5 * (kernel_.residual() * quad_form(ops_.K, u_) + quad_form(ops_.M_total, v_) +
                history_quadratic(false));
}

double ConvolutionSolver::paper_energy() const {
  return 0.5 * (quad_form(ops_.K, u_) + quad_form(ops_.M, v_) + history_quadratic(false));
}

double ConvolutionSolver::dissipation() const { return 0.5 * history_quadratic(true); }

}  // namespace memwave
