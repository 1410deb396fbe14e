//! The end-to-end summoning protocol: assign each code qubit to an agent,
//! forward on request, decode at the chosen reveal point, and report the
//! run with its full message list.
//!
//! Diamond ids double as code vertices, so a configuration with diamonds
//! 1..=N drives the code on K_Ñ with Ñ = N rounded up to even. For odd N
//! the extra vertex is purely combinatorial: its edge qubits q_{j,Ñ} are
//! sent straight from the start point to reveal agent A_{z_j} and wait
//! there, since no request is ever addressed to the extra vertex.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::circuits::{synth_decoder, synth_encoder, Circuit, CircuitError};
use crate::code::{build_css, CodeError, StabilizerCode};
use crate::gf2::{EdgeIndexMap, Gf2Error};
use crate::simulator::{MeasurementRecord, SimError, StateVector};
use crate::spacetime::{
    precedes, validate, CausalDiamond, Configuration, Event, SpacetimeError, ValidationReport,
};

const NORM_TOL: f64 = 1e-9;

/// Errors from routing and protocol simulation.
#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("configuration invalid: {0}")]
    InvalidConfiguration(ValidationReport),
    #[error("diamond ids must be exactly 1..={n}, got {found:?}")]
    NonContiguousIds { n: usize, found: Vec<usize> },
    #[error("no causally reachable holder for the qubit of edge ({i},{j})")]
    RoutingInfeasible { i: usize, j: usize },
    #[error("edge ({i},{j}) is not assigned")]
    UnassignedEdge { i: usize, j: usize },
    #[error("edge ({i},{j}) assigned to an agent of vertex {holder}, not an endpoint")]
    BadAssignment { i: usize, j: usize, holder: usize },
    #[error("message carrying {qubit} would travel outside the light cone")]
    CausalityViolation {
        from: Event,
        to: Event,
        qubit: String,
    },
    #[error("requested vertex {r} outside 1..={n}")]
    RequestOutOfRange { r: usize, n: usize },
    #[error("input amplitudes have norm {norm}, expected 1")]
    NotNormalized { norm: f64 },
    #[error("decoder needs all {need} star qubits, got {have}")]
    InsufficientQubits { have: usize, need: usize },
    #[error("requested set is empty")]
    EmptyRequestSet,
    #[error("causal order must list every diamond id exactly once")]
    OrderNotPermutation,
    #[error("causal order inconsistent: request of diamond {later} precedes reveal of diamond {earlier}")]
    OrderInconsistent { earlier: usize, later: usize },
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Spacetime(#[from] SpacetimeError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// Which agent first receives a qubit from the start point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitHolder {
    /// Request agent A_{y_i}; the qubit waits for the summoning request.
    Request(usize),
    /// Reveal agent A_{z_j}; used for the extra-vertex qubits of odd N,
    /// which skip the request stage entirely.
    Reveal(usize),
}

/// Where a request-held qubit is forwarded: to the holder's own reveal
/// agent when the holder is requested, otherwise to the other endpoint's.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForwardRule {
    pub when_requested: usize,
    pub when_not_requested: usize,
}

/// Initial assignment of every edge qubit of K_Ñ to an agent, plus the
/// derived forwarding behavior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingPlan {
    n: usize,
    n_tilde: usize,
    assignments: BTreeMap<(usize, usize), QubitHolder>,
}

impl RoutingPlan {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_tilde(&self) -> usize {
        self.n_tilde
    }

    pub fn assignments(&self) -> &BTreeMap<(usize, usize), QubitHolder> {
        &self.assignments
    }

    pub fn holder(&self, i: usize, j: usize) -> Option<QubitHolder> {
        self.assignments.get(&(i.min(j), i.max(j))).copied()
    }

    /// Overrides one assignment; exists so tests can corrupt a plan and
    /// confirm [`RoutingPlan::validate_against`] catches it.
    pub fn set_assignment(&mut self, i: usize, j: usize, holder: QubitHolder) {
        self.assignments.insert((i.min(j), i.max(j)), holder);
    }

    /// The forwarding rule for an edge, if its qubit waits with a request
    /// agent; direct-to-reveal qubits never move again.
    pub fn forward_rule(&self, i: usize, j: usize) -> Option<ForwardRule> {
        let (i, j) = (i.min(j), i.max(j));
        match self.assignments.get(&(i, j))? {
            QubitHolder::Request(h) => Some(ForwardRule {
                when_requested: *h,
                when_not_requested: i + j - h,
            }),
            QubitHolder::Reveal(_) => None,
        }
    }

    /// The reveal vertex this edge's qubit ends at when r is requested.
    pub fn destination(&self, i: usize, j: usize, r: usize) -> Option<usize> {
        let (i, j) = (i.min(j), i.max(j));
        Some(match self.assignments.get(&(i, j))? {
            QubitHolder::Request(h) => {
                if *h == r {
                    r
                } else {
                    i + j - h
                }
            }
            QubitHolder::Reveal(h) => *h,
        })
    }

    /// Every edge whose qubit reaches A_{z_r} when r is requested, in
    /// canonical order. For an intact plan this is exactly the star of r.
    pub fn delivered_edges(&self, r: usize) -> Vec<(usize, usize)> {
        self.assignments
            .keys()
            .filter(|&&(i, j)| self.destination(i, j, r) == Some(r))
            .copied()
            .collect()
    }

    /// Full soundness check against the geometry: every edge assigned to an
    /// endpoint agent, every message (initial distribution and both
    /// forwarding branches) inside the light cone, and the delivered set
    /// equal to the star of r for every r. [`build_routing`] output always
    /// passes; hand-mutated plans generally do not.
    pub fn validate_against(&self, config: &Configuration) -> Result<(), ProtocolError> {
        let edges = EdgeIndexMap::new(self.n_tilde)?;
        let diamond = |v: usize| config.diamond(v).expect("contiguous ids");
        let check_message =
            |from: &Event, to: &Event, i: usize, j: usize| -> Result<(), ProtocolError> {
                if precedes(from, to)? {
                    Ok(())
                } else {
                    Err(ProtocolError::CausalityViolation {
                        from: from.clone(),
                        to: to.clone(),
                        qubit: format!("e_{i}_{j}"),
                    })
                }
            };

        for (i, j) in edges.edges() {
            let holder = self
                .assignments
                .get(&(i, j))
                .ok_or(ProtocolError::UnassignedEdge { i, j })?;
            match holder {
                QubitHolder::Request(h) => {
                    if *h != i && *h != j {
                        return Err(ProtocolError::BadAssignment { i, j, holder: *h });
                    }
                    if *h > self.n || j > self.n {
                        // Extra-vertex qubits must not pass through request
                        // agents; the extra vertex has no agent at all.
                        return Err(ProtocolError::BadAssignment { i, j, holder: *h });
                    }
                    let hold = diamond(*h);
                    let other = diamond(i + j - h);
                    check_message(&config.start, &hold.request, i, j)?;
                    check_message(&hold.request, &hold.reveal, i, j)?;
                    check_message(&hold.request, &other.reveal, i, j)?;
                }
                QubitHolder::Reveal(h) => {
                    if *h != i || j <= self.n {
                        return Err(ProtocolError::BadAssignment { i, j, holder: *h });
                    }
                    check_message(&config.start, &diamond(*h).reveal, i, j)?;
                }
            }
        }

        for r in 1..=self.n {
            let star: Vec<(usize, usize)> = edges
                .edges()
                .filter(|&(i, j)| i == r || j == r)
                .collect();
            let delivered = self.delivered_edges(r);
            if delivered != star {
                return Err(ProtocolError::InsufficientQubits {
                    have: delivered.iter().filter(|e| star.contains(e)).count(),
                    need: star.len(),
                });
            }
        }
        Ok(())
    }
}

fn contiguous_ids(config: &Configuration) -> Result<usize, ProtocolError> {
    let mut ids: Vec<usize> = config.diamonds.iter().map(|d| d.id).collect();
    ids.sort_unstable();
    let n = config.n_diamonds();
    if ids != (1..=n).collect::<Vec<_>>() {
        return Err(ProtocolError::NonContiguousIds { n, found: ids });
    }
    Ok(n)
}

/// Assigns every edge qubit of K_Ñ to its initial holder.
///
/// A real edge {i,j} goes to request agent A_{y_i} if y_i can signal z_j
/// (so the qubit can still reach the other reveal when i is not requested)
/// and the start point can reach y_i at all; when both endpoints qualify,
/// the lower index wins. Odd N adds the extra vertex Ñ = N+1, whose edge
/// qubits go straight to the real endpoint's reveal agent.
pub fn build_routing(config: &Configuration) -> Result<RoutingPlan, ProtocolError> {
    let report = validate(config);
    if !report.is_valid() {
        return Err(ProtocolError::InvalidConfiguration(report));
    }
    let n = contiguous_ids(config)?;
    let n_tilde = n + n % 2;
    let edges = EdgeIndexMap::new(n_tilde)?;
    let diamond = |v: usize| config.diamond(v).expect("contiguous ids");

    let mut assignments = BTreeMap::new();
    for (i, j) in edges.edges() {
        if j > n {
            // Extra-vertex qubit: parked with the real endpoint's reveal
            // agent from the start (start ≺ reveal is condition C1).
            assignments.insert((i, j), QubitHolder::Reveal(i));
            continue;
        }
        let reachable = |h: usize, other: usize| -> bool {
            precedes(&config.start, &diamond(h).request).expect("validated dims")
                && precedes(&diamond(h).request, &diamond(other).reveal).expect("validated dims")
        };
        let holder = if reachable(i, j) {
            i
        } else if reachable(j, i) {
            j
        } else {
            return Err(ProtocolError::RoutingInfeasible { i, j });
        };
        assignments.insert((i, j), QubitHolder::Request(holder));
    }
    Ok(RoutingPlan {
        n,
        n_tilde,
        assignments,
    })
}

/// One qubit in flight between two agent events.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Message {
    pub from: Event,
    pub to: Event,
    pub qubit: String,
}

/// Everything a single summoning execution produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummoningRun {
    pub requested: usize,
    /// Edge labels of the qubits that reached the requested reveal agent.
    pub delivered: Vec<String>,
    pub fidelity: f64,
    pub messages: Vec<Message>,
    pub seed: u64,
    #[serde(skip)]
    pub measurement_record: MeasurementRecord,
}

/// Builds the decoder for vertex r, remapped onto the full register, after
/// confirming the delivered qubits are exactly the star of r; a short or
/// wrong set is refused rather than decoded badly.
pub fn decode_delivered(
    code: &StabilizerCode,
    delivered_positions: &[usize],
    r: usize,
) -> Result<Circuit, ProtocolError> {
    let star = code.star_positions(r)?;
    let mut sorted = delivered_positions.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted != star {
        return Err(ProtocolError::InsufficientQubits {
            have: star.iter().filter(|p| sorted.contains(p)).count(),
            need: star.len(),
        });
    }
    Ok(synth_decoder(code, r)?.remap(code.n_qubits(), &star, Vec::new())?)
}

/// Runs one complete summoning: encode the input qubit, distribute per the
/// routing plan, request vertex r, forward, decode at A_{z_r}, and measure
/// the output fidelity against the input. Every message is checked against
/// the light cone as it is sent.
pub fn simulate_summon(
    config: &Configuration,
    alpha: Complex64,
    beta: Complex64,
    r: usize,
    seed: u64,
) -> Result<SummoningRun, ProtocolError> {
    let plan = build_routing(config)?;
    if r < 1 || r > plan.n() {
        return Err(ProtocolError::RequestOutOfRange { r, n: plan.n() });
    }
    let norm2 = alpha.norm_sqr() + beta.norm_sqr();
    if (norm2 - 1.0).abs() > NORM_TOL {
        return Err(ProtocolError::NotNormalized {
            norm: norm2.sqrt(),
        });
    }
    plan.validate_against(config)?;

    let code = build_css(plan.n_tilde())?;
    let edges = EdgeIndexMap::new(plan.n_tilde())?;
    let encoder = synth_encoder(&code)?;
    let mut state = StateVector::with_input_qubit(code.n_qubits(), alpha, beta)?;
    state.apply_circuit(&encoder, seed)?;

    let diamond = |v: usize| config.diamond(v).expect("contiguous ids");
    let mut messages = Vec::new();
    let mut send = |from: &Event, to: &Event, i: usize, j: usize| -> Result<(), ProtocolError> {
        let qubit = format!("e_{i}_{j}");
        if !precedes(from, to)? {
            return Err(ProtocolError::CausalityViolation {
                from: from.clone(),
                to: to.clone(),
                qubit,
            });
        }
        messages.push(Message {
            from: from.clone(),
            to: to.clone(),
            qubit,
        });
        Ok(())
    };

    // Initial distribution from the start point.
    for (&(i, j), holder) in plan.assignments() {
        let target = match holder {
            QubitHolder::Request(h) => &diamond(*h).request,
            QubitHolder::Reveal(h) => &diamond(*h).reveal,
        };
        send(&config.start, target, i, j)?;
    }
    // Forwarding after the request reaches the agents.
    for (&(i, j), holder) in plan.assignments() {
        if let QubitHolder::Request(h) = holder {
            let dest = plan.destination(i, j, r).expect("assigned edge");
            send(&diamond(*h).request, &diamond(dest).reveal, i, j)?;
        }
    }

    let delivered_edges = plan.delivered_edges(r);
    let delivered_positions: Vec<usize> = delivered_edges
        .iter()
        .map(|&(i, j)| edges.index(i, j))
        .collect::<Result<_, _>>()?;
    let decoder = decode_delivered(&code, &delivered_positions, r)?;
    let record = state.apply_circuit(&decoder, seed)?;

    let star = code.star_positions(r)?;
    let rho = state.partial_trace(&[star[0]])?;
    let psi = StateVector::single_qubit(alpha, beta)?;
    let fidelity = rho.fidelity_qubit(&psi)?;

    Ok(SummoningRun {
        requested: r,
        delivered: delivered_edges
            .iter()
            .map(|&(i, j)| format!("e_{i}_{j}"))
            .collect(),
        fidelity,
        messages,
        seed,
        measurement_record: record,
    })
}

/// The ordered multi-request variant: the request goes to several agents,
/// and the first of them under the agreed causal order complies. The order
/// must match the geometry: no diamond's request may precede the reveal of
/// a diamond placed earlier in the order.
pub fn simulate_multi_request(
    config: &Configuration,
    requested_set: &[usize],
    causal_order: &[usize],
    alpha: Complex64,
    beta: Complex64,
    seed: u64,
) -> Result<SummoningRun, ProtocolError> {
    let report = validate(config);
    if !report.is_valid() {
        return Err(ProtocolError::InvalidConfiguration(report));
    }
    let n = contiguous_ids(config)?;

    let mut sorted_order = causal_order.to_vec();
    sorted_order.sort_unstable();
    if sorted_order != (1..=n).collect::<Vec<_>>() {
        return Err(ProtocolError::OrderNotPermutation);
    }
    if requested_set.is_empty() {
        return Err(ProtocolError::EmptyRequestSet);
    }
    for &v in requested_set {
        if v < 1 || v > n {
            return Err(ProtocolError::RequestOutOfRange { r: v, n });
        }
    }

    let diamond = |v: usize| config.diamond(v).expect("contiguous ids");
    for (pos, &earlier) in causal_order.iter().enumerate() {
        for &later in &causal_order[pos + 1..] {
            if precedes(&diamond(later).request, &diamond(earlier).reveal)? {
                return Err(ProtocolError::OrderInconsistent { earlier, later });
            }
        }
    }

    let r = *causal_order
        .iter()
        .find(|v| requested_set.contains(v))
        .expect("non-empty subset of a permutation");
    simulate_summon(config, alpha, beta, r, seed)
}

/// Four causal diamonds on a triangular prism in 2+1 dimensions: requests
/// at the base corners and base centroid at t = 0, reveals at the top-face
/// edge midpoints and top centroid at t = 1.25, start point directly below
/// the centroid. Coordinates are fixed constants chosen so that validity
/// holds with a comfortable margin (roughly 0.095 at the tightest pair).
pub fn make_prism_config() -> Configuration {
    let r = 2.0 / 3.0_f64.sqrt();
    let base = 0.0;
    let top = 1.25;
    let diamonds = vec![
        CausalDiamond {
            id: 1,
            request: Event::new(base, vec![0.0, 0.0]),
            reveal: Event::new(top, vec![0.0, 0.0]),
        },
        CausalDiamond {
            id: 2,
            request: Event::new(base, vec![r, 0.0]),
            reveal: Event::new(top, vec![r / 4.0, 0.5]),
        },
        CausalDiamond {
            id: 3,
            request: Event::new(base, vec![-r / 2.0, 1.0]),
            reveal: Event::new(top, vec![-r / 2.0, 0.0]),
        },
        CausalDiamond {
            id: 4,
            request: Event::new(base, vec![-r / 2.0, -1.0]),
            reveal: Event::new(top, vec![r / 4.0, -0.5]),
        },
    ];
    Configuration {
        dim: 2,
        start: Event::new(-top, vec![0.0, 0.0]),
        diamonds,
    }
}

/// n diamonds strung along a single worldline, each one's reveal before the
/// next one's request: the simplest geometry with a consistent total order
/// (1, 2, …, n) for the multi-request variant.
pub fn make_chain_config(n: usize) -> Configuration {
    let diamonds = (1..=n)
        .map(|i| CausalDiamond {
            id: i,
            request: Event::new(4.0 * i as f64, vec![0.0]),
            reveal: Event::new(4.0 * i as f64 + 1.0, vec![0.0]),
        })
        .collect();
    Configuration {
        dim: 1,
        start: Event::new(-1.0, vec![0.0]),
        diamonds,
    }
}

/// Three diamonds side by side in 1+1 dimensions with every causal
/// predicate bidirectional; exercises the odd-N extra vertex.
pub fn make_three_diamond_config() -> Configuration {
    let positions = [-1.0, 0.0, 1.0];
    let diamonds = positions
        .iter()
        .enumerate()
        .map(|(k, &x)| CausalDiamond {
            id: k + 1,
            request: Event::new(0.0, vec![x]),
            reveal: Event::new(3.0, vec![x]),
        })
        .collect();
    Configuration {
        dim: 1,
        start: Event::new(-2.0, vec![0.0]),
        diamonds,
    }
}
