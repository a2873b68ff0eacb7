#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ovsim/optics.hpp"

namespace ovsim {

/// Uniformly sampled detector trace.
struct Waveform {
  std::vector<double> time;       // s
  std::vector<double> intensity;  // normalized to the input power
  double sample_rate = 0.0;       // Hz
};

/// Sinusoidal drive V(t) = amplitude * cos(2 pi f t + phase).
struct Drive {
  double amplitude = 0.0;  // V
  double frequency = 50.0;
  double phase = 0.0;
  double duration = 0.16;
  double sample_rate = 100e3;
};

/// Per sample: a modulation retarder at 45 degrees with phase pi V / hwv, followed by the
/// stress sections of that instant. With no stress this is I = (1 + sin(pi V / hwv)) / 2.
Waveform synthesize(const std::function<std::vector<SectionBirefringence>(double)>& sections_at,
                    const std::function<double(double)>& voltage, double hwv, double duration,
                    double sample_rate);

/// Static stress sections under a sinusoidal drive.
Waveform synthesize(std::span<const SectionBirefringence> sections, const Drive& drive, double hwv);

/// I(t) = I_AC cos(2 pi f t + phi) + a t^2 + b t + c.
struct DriftFit {
  double I_AC = 0.0;
  double phi = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double residual_rms = 0.0;
  double error = 0.0;  // mean of the fitted DC part over the window, minus 0.5
};

/// Linear least squares on {cos, sin, t^2, t, 1}. Throws SolverError for fewer than four
/// drive periods or a rank-deficient design.
DriftFit fit_drift(const Waveform& w, double drive_freq);

/// Rescales a drift accumulated over tau to the reference duration tau_ref.
/// Throws std::invalid_argument for nonpositive durations.
double bias_correct(double raw_error, double tau, double tau_ref);

/// Bias instability (B_s^2 / 2 pi) * tau.
double sigma_bi(double B_s, double tau);

struct BiasStats {
  double B_s = 0.0;
  double tau = 0.0;
  double sigma_BI = 0.0;
  double corrected_error = 0.0;
};

BiasStats bias_stats(double B_s, double raw_error, double tau, double tau_ref);

}  // namespace ovsim
