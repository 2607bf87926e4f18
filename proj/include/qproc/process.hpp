#pragma once

#include <variant>
#include <vector>

#include "qproc/behavior.hpp"
#include "qproc/prelocc.hpp"

namespace qproc {

/*
 * A channel annotated with its input-output delay time (abstract units,
 * +infinity allowed) and a fixed spatial-separation flag. Instantaneous means
 * delay zero; an instantaneous, spatially separated process whose channel
 * signals in either direction is not physically realizable.
 */
struct Process {
  std::variant<QuantumChannel, Behavior> channel;
  double delay = 0.0;
  bool spatially_separated = true;

  Process() = default;
  Process(QuantumChannel c, double dt, bool sep = true);
  Process(Behavior b, double dt, bool sep = true);

  bool is_classical() const { return std::holds_alternative<Behavior>(channel); }
  bool instantaneous() const { return delay == 0.0; }
  const QuantumChannel& quantum() const { return std::get<QuantumChannel>(channel); }
  const Behavior& behavior() const { return std::get<Behavior>(channel); }
  Signalling signalling() const;
};

enum class Verdict { Yes, No, Unknown };
enum class ResourceKind { None, Entanglement, BellNonlocality, Unknown };

struct ProcessClassification {
  bool instantaneous = false;
  Verdict free = Verdict::Unknown;
  ResourceKind resource_kind = ResourceKind::Unknown;
};

/*
 * Freeness of a process under LOCC superprocesses.
 *   - Instantaneous classical processes are free exactly when they admit a
 *     local model (LP test); nonlocal ones carry Bell nonlocality.
 *   - Non-instantaneous classical processes are always free.
 *   - Quantum processes are judged by their Choi matrix: an NPT Choi rules
 *     out any LOCC realization (LOCC is contained in the separable
 *     operations) at any delay; a certified-separable Choi together with
 *     non-signalling certifies an LOSR realization; anything else is an
 *     honest `unknown`.
 */
ProcessClassification classify(const Process& p);

// False exactly for instantaneous, spatially separated, signalling channels.
bool check_realizable(const Process& p);

enum class SuperprocessForm { LosrForm, PreLoccForm, General };

// Delay-time-preserving local superprocess on quantum processes: a shared-
// randomness mixture of product pre/post channels with local side memories.
struct LosrSuperprocess {
  struct Member {
    double weight = 1.0;
    QuantumChannel pre_a;   // A0' -> E_A (x) A0, outputs ordered [E_A, A0]
    QuantumChannel pre_b;   // B0' -> E_B (x) B0
    QuantumChannel post_a;  // E_A (x) A1 -> A1'
    QuantumChannel post_b;  // E_B (x) B1 -> B1'
    int mem_a = 1, mem_b = 1;
  };
  std::vector<Member> members;
};

// Pre-processing LOCC followed by an instantaneous local measurement stage
// with classical inputs and outputs: the shape that converts any process into
// an instantaneous classical one.
struct PreLoccSuperprocess {
  // State prepared by the pre stage, on [feedA, feedB, memA, memB]; the feeds
  // match the transformed channel's inputs.
  DensityMatrix pre_state;
  int mem_a = 1, mem_b = 1;
  // Measurement per classical input, acting on (A1 (x) memA) and (B1 (x) memB).
  std::vector<Povm> post_a;
  std::vector<Povm> post_b;
};

struct GeneralSuperprocess {
  QuantumChannel pre;   // in' -> E (x) in, outputs ordered [E, in]
  QuantumChannel post;  // E (x) out -> out'
  int env_dim = 1;
  double pre_delay = 0.0, post_delay = 0.0;
  // Bipartite labels of the resulting channel.
  int out_dA0 = 1, out_dB0 = 1, out_dA1 = 1, out_dB1 = 1;
};

struct Superprocess {
  std::variant<LosrSuperprocess, LosrBehaviorMap, PreLoccSuperprocess, GeneralSuperprocess> impl;

  SuperprocessForm form() const;
};

/*
 * Composition rules:
 *   LOSR form      : output delay = input delay
 *   pre-LOCC form  : output delay = 0 (post stage is instantaneous-local)
 *   general form   : output delay = pre delay + input delay + post delay
 */
Process apply_superprocess(const Superprocess& sp, const Process& p);

// The joint state at the tilde-A1 tilde-B1 cut of a pre-LOCC pipeline, i.e.
// after the transformed channel has acted on the prepared state, grouped as
// [(A1 memA), (B1 memB)].
DensityMatrix prelocc_intermediate_state(const PreLoccSuperprocess& sp,
                                         const QuantumChannel& n);

// Truth table for which superprocess forms can realize a given delay-time
// transition.
bool theorem1_form_check(SuperprocessForm form, double in_delay, double out_delay);

/*
 * Local-operations-shared-entanglement construction: the instantaneous
 * process whose channel acts as (E (x) F)(rho (x) omega), with E: A0 A2 -> A1
 * and F: B0 B2 -> B1 consuming the shared state omega on [A2, B2]. The result
 * never signals.
 */
Process lose_construct(const DensityMatrix& omega, const QuantumChannel& local_a,
                       const QuantumChannel& local_b, int dA0, int dB0);

// Party-local measure-in-basis-then-measure-share channel: reads the
// computational basis of its first factor (dim n_settings) and measures the
// share with the POVM selected by the reading. Output is classical.
QuantumChannel conditioned_measurement_channel(const std::vector<Povm>& povms,
                                               int d_share);

// The canonical CHSH-optimal LOSE channel: phi+ shared, both parties reading
// a basis input and measuring at the optimal angles. Evaluating the POVM
// witness on it lands at 3/4 - cos^2(pi/8).
Process tsirelson_lose_process();

}  // namespace qproc
