#include "beamsw/phy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace beamsw {

Codebook::Codebook(Eigen::MatrixXcd beams) : beams_(std::move(beams)) {
  if (beams_.rows() == 0 || beams_.cols() == 0) {
    throw std::invalid_argument("codebook must contain at least one beam of one element");
  }
}

double LinkBudget::noise_power_dbm() const {
  return kThermalNoiseDbmPerHz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

void LinkBudget::validate() const {
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth_hz must be > 0");
  if (!(blockage_attenuation_db >= 0.0)) {
    throw std::invalid_argument("blockage_attenuation_db must be >= 0");
  }
  if (!(carrier_freq_hz > 0.0)) throw std::invalid_argument("carrier_freq_hz must be > 0");
  if (!std::isfinite(tx_power_dbm)) throw std::invalid_argument("tx_power_dbm must be finite");
  if (!std::isfinite(noise_figure_db)) throw std::invalid_argument("noise_figure_db must be finite");
}

void ChannelModelConfig::validate() const {
  if (!(antenna_spacing_wavelengths > 0.0)) {
    throw std::invalid_argument("antenna_spacing_wavelengths must be > 0");
  }
  if (std::isnan(rician_k_db)) throw std::invalid_argument("rician_k_db must not be NaN");
}

Codebook make_dft_codebook(std::size_t n_antennas) { return make_dft_codebook(n_antennas, n_antennas); }

Codebook make_dft_codebook(std::size_t n_antennas, std::size_t n_beams) {
  if (n_antennas == 0) throw std::invalid_argument("make_dft_codebook: n_antennas must be >= 1");
  if (n_beams == 0 || n_beams > n_antennas) {
    throw std::invalid_argument("make_dft_codebook: n_beams must be in [1, n_antennas]");
  }
  const auto n = static_cast<Eigen::Index>(n_antennas);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_antennas));
  Eigen::MatrixXcd beams(n, static_cast<Eigen::Index>(n_beams));
  for (std::size_t j = 0; j < n_beams; ++j) {
    // Evenly spaced DFT columns; identity mapping when n_beams == n_antennas.
    const std::size_t b = j * n_antennas / n_beams;
    for (Eigen::Index e = 0; e < n; ++e) {
      // Reduce n*b mod N before scaling so the phase stays exact for large N.
      const auto k = static_cast<double>((static_cast<std::size_t>(e) * b) % n_antennas);
      const double phase = 2.0 * std::numbers::pi * k / static_cast<double>(n_antennas);
      beams(e, static_cast<Eigen::Index>(j)) = std::polar(scale, phase);
    }
  }
  return Codebook(std::move(beams));
}

ChannelVector steering_vector(double angle_rad, std::size_t n_antennas, double spacing_wavelengths) {
  if (std::abs(angle_rad) > std::numbers::pi / 2 + 1e-12) {
    throw std::invalid_argument("steering_vector: |angle| must be <= pi/2");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_antennas));
  const double step = 2.0 * std::numbers::pi * spacing_wavelengths * std::sin(angle_rad);
  ChannelVector a(static_cast<Eigen::Index>(n_antennas));
  for (Eigen::Index n = 0; n < a.size(); ++n) a(n) = std::polar(scale, step * static_cast<double>(n));
  return a;
}

double umi_breakpoint_m(double bs_height_m, double ue_height_m, double carrier_freq_hz) {
  return 4.0 * (bs_height_m - 1.0) * (ue_height_m - 1.0) * carrier_freq_hz / kSpeedOfLight;
}

double path_loss_umi_db(double distance_2d_m, double bs_height_m, double ue_height_m,
                        double carrier_freq_hz) {
  if (!(bs_height_m > 0.0) || !(ue_height_m > 0.0)) {
    throw std::invalid_argument("path_loss_umi_db: antenna heights must be > 0");
  }
  const double d2 = std::max(distance_2d_m, 1.0);
  const double dh = bs_height_m - ue_height_m;
  const double d3 = std::sqrt(d2 * d2 + dh * dh);
  const double f_ghz = carrier_freq_hz / 1e9;
  const double d_bp = umi_breakpoint_m(bs_height_m, ue_height_m, carrier_freq_hz);
  if (d2 <= d_bp) {
    return 32.4 + 21.0 * std::log10(d3) + 20.0 * std::log10(f_ghz);
  }
  return 32.4 + 40.0 * std::log10(d3) + 20.0 * std::log10(f_ghz) -
         9.5 * std::log10(d_bp * d_bp + dh * dh);
}

namespace {

ChannelVector rayleigh_draw(Rng& rng, std::size_t n_antennas) {
  // CN(0, 1): real and imaginary parts each N(0, 1/2).
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ChannelVector h(static_cast<Eigen::Index>(n_antennas));
  for (Eigen::Index n = 0; n < h.size(); ++n) {
    const double re = normal(rng);
    const double im = normal(rng);
    h(n) = Complex(re, im);
  }
  return h;
}

}  // namespace

ChannelVector sample_fading(Rng& rng, const ChannelModelConfig& config, double angle_rad,
                            std::size_t n_antennas) {
  if (config.mode == ChannelMode::kPureRayleigh) return rayleigh_draw(rng, n_antennas);

  const double root_n = std::sqrt(static_cast<double>(n_antennas));
  ChannelVector los = steering_vector(angle_rad, n_antennas, config.antenna_spacing_wavelengths) * root_n;
  if (std::isinf(config.rician_k_db) && config.rician_k_db > 0) return los;

  const double k = std::pow(10.0, config.rician_k_db / 10.0);
  const double los_weight = std::sqrt(k / (k + 1.0));
  const double nlos_weight = std::sqrt(1.0 / (k + 1.0));
  return los_weight * los + nlos_weight * rayleigh_draw(rng, n_antennas);
}

ChannelVector effective_channel(const ChannelVector& h, double path_loss_db) {
  return h * std::sqrt(std::pow(10.0, -path_loss_db / 10.0));
}

double beam_gain(const ChannelVector& h_eff, const Eigen::Ref<const ChannelVector>& beam) {
  if (h_eff.size() != beam.size()) throw std::invalid_argument("beam_gain: length mismatch");
  return std::norm(beam.dot(h_eff));  // Eigen's dot conjugates the left operand
}

double snr_db_from_gain(double gain, const LinkBudget& budget, bool path_blocked,
                        bool beam_is_heuristic) {
  if (!(gain > 0.0) || !std::isfinite(gain)) return kSnrFloorDb;
  double snr = budget.tx_power_dbm + 10.0 * std::log10(gain) - budget.noise_power_dbm();
  if (path_blocked && beam_is_heuristic) snr -= budget.blockage_attenuation_db;
  return snr;
}

double snr_db(const ChannelVector& h_eff, const Eigen::Ref<const ChannelVector>& beam,
              const LinkBudget& budget, bool path_blocked, bool beam_is_heuristic) {
  return snr_db_from_gain(beam_gain(h_eff, beam), budget, path_blocked, beam_is_heuristic);
}

double throughput_mbps(double snr_db, double bandwidth_hz) {
  const double linear = std::pow(10.0, snr_db / 10.0);
  return bandwidth_hz * std::log1p(linear) / std::numbers::ln2 / 1e6;
}

std::size_t heuristic_beam_index(double angle_rad, const Codebook& codebook,
                                 double spacing_wavelengths) {
  const ChannelVector a = steering_vector(angle_rad, codebook.n_antennas(), spacing_wavelengths);
  const Eigen::VectorXcd response = codebook.matrix().adjoint() * a;
  std::size_t best = 0;
  double best_mag = -1.0;
  for (Eigen::Index b = 0; b < response.size(); ++b) {
    const double mag = std::abs(response(b));
    if (mag > best_mag) {
      best_mag = mag;
      best = static_cast<std::size_t>(b);
    }
  }
  return best;
}

}  // namespace beamsw
