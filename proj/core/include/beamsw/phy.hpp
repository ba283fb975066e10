#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <limits>

#include "beamsw/rng.hpp"

namespace beamsw {

using Complex = std::complex<double>;

/// Antenna-domain channel or beam weights, one complex entry per element.
using ChannelVector = Eigen::VectorXcd;

inline constexpr double kSpeedOfLight = 3.0e8;
inline constexpr double kThermalNoiseDbmPerHz = -174.0;
inline constexpr double kSnrFloorDb = -60.0;

/// N_b unit-norm beams stored as the columns of an N_A x N_b matrix.
class Codebook {
 public:
  explicit Codebook(Eigen::MatrixXcd beams);

  std::size_t n_antennas() const { return static_cast<std::size_t>(beams_.rows()); }
  std::size_t n_beams() const { return static_cast<std::size_t>(beams_.cols()); }

  auto beam(std::size_t b) const { return beams_.col(static_cast<Eigen::Index>(b)); }
  const Eigen::MatrixXcd& matrix() const { return beams_; }

 private:
  Eigen::MatrixXcd beams_;
};

struct LinkBudget {
  double tx_power_dbm = 38.0;
  double bandwidth_hz = 100e6;
  double noise_figure_db = 7.0;
  double carrier_freq_hz = 28e9;
  double blockage_attenuation_db = 12.0;

  /// -174 dBm/Hz + 10 log10(B) + NF.
  double noise_power_dbm() const;
  void validate() const;
};

enum class ChannelMode { kPureRayleigh, kRician };

struct ChannelModelConfig {
  ChannelMode mode = ChannelMode::kRician;
  /// +infinity selects a pure line-of-sight channel.
  double rician_k_db = 10.0;
  double antenna_spacing_wavelengths = 0.5;

  void validate() const;
};

/// N-point DFT codebook: beam b, element n = exp(i 2 pi n b / N) / sqrt(N).
Codebook make_dft_codebook(std::size_t n_antennas);

/// n_beams evenly spaced columns of the n_antennas-point DFT (n_beams <= n_antennas).
Codebook make_dft_codebook(std::size_t n_antennas, std::size_t n_beams);

/// Unit-norm ULA response: element n = exp(i 2 pi d n sin(angle)) / sqrt(N).
ChannelVector steering_vector(double angle_rad, std::size_t n_antennas, double spacing_wavelengths);

/// 3GPP TR 38.901 UMi street canyon, LOS branch. Distances under 1 m are
/// clamped to 1 m.
double path_loss_umi_db(double distance_2d_m, double bs_height_m, double ue_height_m,
                        double carrier_freq_hz);

/// Breakpoint distance 4 (h_BS - 1)(h_UT - 1) f_c / c.
double umi_breakpoint_m(double bs_height_m, double ue_height_m, double carrier_freq_hz);

/// One block-fading realization with E||h||^2 = N.
ChannelVector sample_fading(Rng& rng, const ChannelModelConfig& config, double angle_rad,
                            std::size_t n_antennas);

/// Applies path loss as a linear amplitude gain sqrt(10^(-PL/10)).
ChannelVector effective_channel(const ChannelVector& h, double path_loss_db);

/// |w^H h|^2 as a power gain.
double beam_gain(const ChannelVector& h_eff, const Eigen::Ref<const ChannelVector>& beam);

/// Received SNR in dB. The blockage attenuation is subtracted only when the
/// path is blocked and the beam is the heuristic (direct path) beam.
double snr_db(const ChannelVector& h_eff, const Eigen::Ref<const ChannelVector>& beam,
              const LinkBudget& budget, bool path_blocked, bool beam_is_heuristic);

/// Same as snr_db but from a precomputed beam gain.
double snr_db_from_gain(double gain, const LinkBudget& budget, bool path_blocked,
                        bool beam_is_heuristic);

/// Shannon rate B log2(1 + SNR) in Mbps.
double throughput_mbps(double snr_db, double bandwidth_hz);

/// Codebook beam best aligned with the direct path; ties go to the lowest index.
std::size_t heuristic_beam_index(double angle_rad, const Codebook& codebook,
                                 double spacing_wavelengths);

}  // namespace beamsw
