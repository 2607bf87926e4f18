#pragma once

#include <vector>

#include "qproc/behavior.hpp"

namespace qproc {

// A finite quantum instrument: completely positive branches (one Kraus list
// per classical outcome) that sum to a CPTP map.
struct Instrument {
  std::vector<std::vector<Mat>> branches;
  int dim = 0;

  Instrument() = default;
  Instrument(std::vector<std::vector<Mat>> b, int d);  // validates closure

  int n_outcomes() const { return static_cast<int>(branches.size()); }
};

// Local filter {F, sqrt(I - F^dag F)}: outcome 0 is success.
Instrument filter_instrument(const Mat& f);
// Classical coin: n outcomes with the given probabilities, state untouched.
Instrument shared_randomness_instrument(const std::vector<double>& probs, int dim);

enum class Party { A, B };

/*
 * Finite-round pre-processing LOCC protocol on a bipartite state. Rounds act
 * before any Bell inputs arrive; each round one party applies an instrument
 * (chosen from the classical transcript so far) and broadcasts the outcome.
 * Transcripts are flattened mixed-radix, outcome-major.
 */
struct PreLoccProtocol {
  struct Round {
    Party party;
    // One instrument per transcript prefix, or a single unconditioned one.
    std::vector<Instrument> instruments;

    const Instrument& for_transcript(size_t flat) const {
      return instruments.size() == 1 ? instruments[0] : instruments.at(flat);
    }
  };
  std::vector<Round> rounds;

  size_t n_transcripts() const;
};

// Behavior generated by running the protocol on `state` and then measuring
// with transcript-conditioned POVMs: a transcript-probability-weighted sum of
// Born-rule behaviors of the conditioned post-protocol states. With an empty
// protocol this is exactly behavior_from_state.
Behavior behavior_from_prelocc(
    const DensityMatrix& state, const PreLoccProtocol& protocol,
    const std::vector<std::vector<Povm>>& a_povms_by_transcript,
    const std::vector<std::vector<Povm>>& b_povms_by_transcript);

// Post-protocol leaves: conditioned state and probability per transcript
// (zero-probability branches are kept with a null state).
struct ProtocolLeaf {
  double probability = 0.0;
  Mat state;  // conditioned (normalized) when probability > 0
};
std::vector<ProtocolLeaf> run_protocol(const DensityMatrix& state,
                                       const PreLoccProtocol& protocol);

struct HiddenNonlocalityReport {
  double pre_chsh = 0.0;   // Horodecki bound of the constructed state
  double post_chsh = 0.0;  // Horodecki bound of the filtered conditional state
  double filter_success_prob = 0.0;
  DensityMatrix state;
  DensityMatrix filtered_state;
};

// Two-qubit state whose CHSH maximum sits below the local bound until a local
// filter on each side reveals the violation.
HiddenNonlocalityReport demo_hidden_nonlocality();

}  // namespace qproc
