#include "ovsim/signal.hpp"

#include <Eigen/QR>
#include <cmath>
#include <stdexcept>

#include "ovsim/error.hpp"

namespace ovsim {

namespace {

Jones modulation_jones(double v, double hwv) {
  SectionBirefringence m;
  m.axis = kPi / 4.0;
  m.delta = kPi * v / hwv;
  return section_jones(m);
}

}  // namespace

Waveform synthesize(const std::function<std::vector<SectionBirefringence>(double)>& sections_at,
                    const std::function<double(double)>& voltage, double hwv, double duration,
                    double sample_rate) {
  if (!(hwv > 0.0)) throw std::invalid_argument("half-wave voltage must be positive");
  Waveform w;
  w.sample_rate = sample_rate;
  const long n = std::lround(duration * sample_rate);
  w.time.reserve(n);
  w.intensity.reserve(n);
  for (long i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const auto sections = sections_at(t);
    w.time.push_back(t);
    w.intensity.push_back(output_intensity(chain_matrix(sections) * modulation_jones(voltage(t), hwv)));
  }
  return w;
}

Waveform synthesize(std::span<const SectionBirefringence> sections, const Drive& drive, double hwv) {
  if (!(hwv > 0.0)) throw std::invalid_argument("half-wave voltage must be positive");
  const Jones stress = chain_matrix(sections);
  Waveform w;
  w.sample_rate = drive.sample_rate;
  const long n = std::lround(drive.duration * drive.sample_rate);
  w.time.reserve(n);
  w.intensity.reserve(n);
  for (long i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / drive.sample_rate;
    const double v = drive.amplitude * std::cos(2.0 * kPi * drive.frequency * t + drive.phase);
    w.time.push_back(t);
    w.intensity.push_back(output_intensity(stress * modulation_jones(v, hwv)));
  }
  return w;
}

DriftFit fit_drift(const Waveform& w, double drive_freq) {
  const std::size_t n = w.time.size();
  if (n != w.intensity.size()) throw std::invalid_argument("waveform time and intensity lengths differ");
  if (n < 5 || !(drive_freq > 0.0)) throw SolverError("rank-deficient design: too few samples");
  const double window = w.time.back() - w.time.front();
  if (window * drive_freq < 4.0 - 1e-9) {
    throw SolverError("rank-deficient design: window shorter than four drive periods");
  }

  Eigen::MatrixXd X(n, 5);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = w.time[i];
    const double wt = 2.0 * kPi * drive_freq * t;
    X(i, 0) = std::cos(wt);
    X(i, 1) = std::sin(wt);
    X(i, 2) = t * t;
    X(i, 3) = t;
    X(i, 4) = 1.0;
    y[i] = w.intensity[i];
  }
  // Column scaling keeps the rank decision independent of the time unit.
  Eigen::VectorXd scale = X.colwise().norm().transpose();
  for (int j = 0; j < 5; ++j) {
    if (!(scale[j] > 0.0)) throw SolverError("rank-deficient design: empty basis column");
    X.col(j) /= scale[j];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < 5) throw SolverError("rank-deficient design");
  Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd resid = y - X * beta;
  beta = beta.cwiseQuotient(scale);

  DriftFit f;
  f.I_AC = std::hypot(beta[0], beta[1]);
  f.phi = std::atan2(-beta[1], beta[0]);
  f.a = beta[2];
  f.b = beta[3];
  f.c = beta[4];
  f.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(n));
  // Exact window mean of a t^2 + b t + c.
  const double t0 = w.time.front(), t1 = w.time.back();
  double mean_dc = f.c;
  if (t1 > t0) {
    mean_dc += f.a * (t1 * t1 + t1 * t0 + t0 * t0) / 3.0 + f.b * (t1 + t0) / 2.0;
  }
  f.error = mean_dc - 0.5;
  return f;
}

double bias_correct(double raw_error, double tau, double tau_ref) {
  if (!(tau > 0.0) || !(tau_ref > 0.0)) throw std::invalid_argument("nonpositive tau");
  return raw_error * tau_ref / tau;
}

double sigma_bi(double B_s, double tau) { return (B_s * B_s / (2.0 * kPi)) * tau; }

BiasStats bias_stats(double B_s, double raw_error, double tau, double tau_ref) {
  return {B_s, tau, sigma_bi(B_s, tau), bias_correct(raw_error, tau, tau_ref)};
}

}  // namespace ovsim
