//! Minkowski events, causal order, causal diamonds, and configuration
//! validity: every reveal point reachable from the start (C1) and every
//! pair of diamonds causally related (C2).
//!
//! Units fix c = 1 and the metric is flat; spatial dimension is 1 to 3.
//! The light-cone boundary is inclusive: a lightlike signal counts as
//! able to carry information. Comparisons are exact ≥ with no epsilon, so
//! configurations meant to sit exactly on the cone should be authored with
//! representable coordinates.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Errors for causal-order queries; configuration problems are reported as
/// data via [`ValidationReport`], not as errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpacetimeError {
    #[error("events live in {left} vs {right} spatial dimensions")]
    DimensionMismatch { left: usize, right: usize },
    #[error("boost needs at least one spatial axis")]
    BoostNeedsSpatialAxis,
    #[error("configuration invalid: {0}")]
    InvalidConfiguration(ValidationReport),
}

/// A point in Minkowski spacetime, time plus 1–3 spatial coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub x: Vec<f64>,
}

impl Event {
    pub fn new(t: f64, x: Vec<f64>) -> Self {
        Event { t, x }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.iter().all(|c| c.is_finite())
    }
}

/// True iff a signal from `a` can reach `b`: b.t − a.t ≥ ‖b.x − a.x‖₂,
/// boundary inclusive. A partial order on events.
pub fn precedes(a: &Event, b: &Event) -> Result<bool, SpacetimeError> {
    if a.dim() != b.dim() {
        return Err(SpacetimeError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let distance = a
        .x
        .iter()
        .zip(&b.x)
        .map(|(ai, bi)| (bi - ai) * (bi - ai))
        .sum::<f64>()
        .sqrt();
    Ok(b.t - a.t >= distance)
}

/// Boost with the given rapidity along spatial axis 0, any dimension;
/// transverse coordinates are untouched.
pub fn boost(event: &Event, rapidity: f64) -> Result<Event, SpacetimeError> {
    if event.x.is_empty() {
        return Err(SpacetimeError::BoostNeedsSpatialAxis);
    }
    let (cosh, sinh) = (rapidity.cosh(), rapidity.sinh());
    let mut x = event.x.clone();
    let t = event.t * cosh - x[0] * sinh;
    x[0] = x[0] * cosh - event.t * sinh;
    Ok(Event { t, x })
}

/// A request point and a reveal point with the request able to signal the
/// reveal: the region an agent can occupy while serving one summoning task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalDiamond {
    pub id: usize,
    pub request: Event,
    pub reveal: Event,
}

/// True iff at least one diamond's request can signal the other's reveal,
/// i.e. the earliest point of one reaches the latest point of the other.
/// Symmetric by construction.
pub fn causally_related(d1: &CausalDiamond, d2: &CausalDiamond) -> Result<bool, SpacetimeError> {
    Ok(precedes(&d1.request, &d2.reveal)? || precedes(&d2.request, &d1.reveal)?)
}

/// A start point and a set of causal diamonds; the summoning arena.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub dim: usize,
    pub start: Event,
    pub diamonds: Vec<CausalDiamond>,
}

impl Configuration {
    pub fn n_diamonds(&self) -> usize {
        self.diamonds.len()
    }

    pub fn diamond(&self, id: usize) -> Option<&CausalDiamond> {
        self.diamonds.iter().find(|d| d.id == id)
    }
}

/// One concrete defect in a configuration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    /// An event has NaN or infinite coordinates.
    NonFiniteCoordinates { place: String },
    /// An event's spatial dimension differs from the configuration's.
    WrongDimension {
        place: String,
        got: usize,
        expected: usize,
    },
    DuplicateId { id: usize },
    /// request ⊀ reveal: the diamond encloses no causal interval.
    DiamondNotCausal { id: usize },
    /// The start point cannot signal this diamond's reveal point.
    RevealNotReachable { id: usize },
    /// Neither diamond's request reaches the other's reveal.
    PairNotRelated { first: usize, second: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFiniteCoordinates { place } => {
                write!(f, "{place}: non-finite coordinates")
            }
            Violation::WrongDimension {
                place,
                got,
                expected,
            } => write!(f, "{place}: {got} spatial dims, expected {expected}"),
            Violation::DuplicateId { id } => write!(f, "duplicate diamond id {id}"),
            Violation::DiamondNotCausal { id } => {
                write!(f, "diamond {id}: request does not precede reveal")
            }
            Violation::RevealNotReachable { id } => {
                write!(f, "diamond {id}: reveal not in the causal future of start")
            }
            Violation::PairNotRelated { first, second } => {
                write!(f, "diamonds {first} and {second} are not causally related")
            }
        }
    }
}

/// Everything wrong with a configuration; empty means valid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            write!(f, "valid")
        } else {
            write!(f, "{} violation(s)", self.violations.len())
        }
    }
}

/// Checks the whole configuration and reports every defect: per-diamond
/// causal intervals, start-to-reveal reachability (C1), pairwise causal
/// relation (C2), id uniqueness, and coordinate sanity.
pub fn validate(config: &Configuration) -> ValidationReport {
    let mut violations = Vec::new();
    let expected = config.dim;

    let event_ok = |event: &Event, place: &str, violations: &mut Vec<Violation>| -> bool {
        let mut ok = true;
        if !event.is_finite() {
            violations.push(Violation::NonFiniteCoordinates {
                place: place.to_string(),
            });
            ok = false;
        }
        if event.dim() != expected {
            violations.push(Violation::WrongDimension {
                place: place.to_string(),
                got: event.dim(),
                expected,
            });
            ok = false;
        }
        ok
    };

    let start_ok = event_ok(&config.start, "start", &mut violations);

    let mut seen_ids = std::collections::BTreeSet::new();
    let mut clean = Vec::new();
    for diamond in &config.diamonds {
        if !seen_ids.insert(diamond.id) {
            violations.push(Violation::DuplicateId { id: diamond.id });
        }
        let request_ok = event_ok(
            &diamond.request,
            &format!("diamond {} request", diamond.id),
            &mut violations,
        );
        let reveal_ok = event_ok(
            &diamond.reveal,
            &format!("diamond {} reveal", diamond.id),
            &mut violations,
        );
        if request_ok
            && reveal_ok
            && !precedes(&diamond.request, &diamond.reveal).expect("dimensions checked")
        {
            violations.push(Violation::DiamondNotCausal { id: diamond.id });
        }
        if start_ok
            && reveal_ok
            && !precedes(&config.start, &diamond.reveal).expect("dimensions checked")
        {
            violations.push(Violation::RevealNotReachable { id: diamond.id });
        }
        if request_ok && reveal_ok {
            clean.push(diamond);
        }
    }

    for (i, d1) in clean.iter().enumerate() {
        for d2 in &clean[i + 1..] {
            if !causally_related(d1, d2).expect("dimensions checked") {
                violations.push(Violation::PairNotRelated {
                    first: d1.id,
                    second: d2.id,
                });
            }
        }
    }
    ValidationReport { violations }
}

/// The complete graph over diamond ids of a valid configuration: one vertex
/// per diamond, one edge per (causally related) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalGraph {
    pub vertex_ids: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl CausalGraph {
    /// Graphviz rendering: undirected, vertices named d<id>.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph causal {\n");
        for id in &self.vertex_ids {
            out.push_str(&format!("  d{id};\n"));
        }
        for (a, b) in &self.edges {
            out.push_str(&format!("  d{a} -- d{b};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Maps a valid configuration to its complete causal graph; an invalid
/// configuration is an error carrying the full violation report.
pub fn to_complete_graph(config: &Configuration) -> Result<CausalGraph, SpacetimeError> {
    let report = validate(config);
    if !report.is_valid() {
        return Err(SpacetimeError::InvalidConfiguration(report));
    }
    let vertex_ids: Vec<usize> = config.diamonds.iter().map(|d| d.id).collect();
    let mut edges = Vec::new();
    for (i, &a) in vertex_ids.iter().enumerate() {
        for &b in &vertex_ids[i + 1..] {
            edges.push((a, b));
        }
    }
    Ok(CausalGraph { vertex_ids, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ev(t: f64, x: &[f64]) -> Event {
        Event::new(t, x.to_vec())
    }

    /// Four diamonds on one worldline; every pair is causally related.
    fn chain_config() -> Configuration {
        let diamonds = (1..=4)
            .map(|i| CausalDiamond {
                id: i,
                request: ev(4.0 * i as f64, &[0.0]),
                reveal: ev(4.0 * i as f64 + 1.0, &[0.0]),
            })
            .collect();
        Configuration {
            dim: 1,
            start: ev(-1.0, &[0.0]),
            diamonds,
        }
    }

    #[test]
    fn precedes_basic_cases() {
        assert!(precedes(&ev(0.0, &[0.0]), &ev(1.0, &[0.0])).unwrap());
        assert!(!precedes(&ev(0.0, &[0.0]), &ev(1.0, &[2.0])).unwrap());
        // Lightlike boundary is inclusive.
        assert!(precedes(&ev(0.0, &[0.0]), &ev(1.0, &[1.0])).unwrap());
        // Reflexive.
        let e = ev(2.5, &[1.0, -3.0]);
        assert!(precedes(&e, &e).unwrap());
        // Never into the past.
        assert!(!precedes(&ev(1.0, &[0.0]), &ev(0.0, &[0.0])).unwrap());
        assert!(matches!(
            precedes(&ev(0.0, &[0.0]), &ev(1.0, &[0.0, 0.0])),
            Err(SpacetimeError::DimensionMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn precedes_is_antisymmetric_for_distinct_events() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let dim = rng.random_range(1..=3);
            let a = ev(
                rng.random_range(-3.0..3.0),
                &(0..dim)
                    .map(|_| rng.random_range(-3.0..3.0))
                    .collect::<Vec<_>>(),
            );
            let b = ev(
                rng.random_range(-3.0..3.0),
                &(0..dim)
                    .map(|_| rng.random_range(-3.0..3.0))
                    .collect::<Vec<_>>(),
            );
            if a != b {
                assert!(
                    !(precedes(&a, &b).unwrap() && precedes(&b, &a).unwrap()),
                    "both directions causal for distinct events {a:?} {b:?}"
                );
            }
        }
    }

    #[test]
    fn precedes_is_transitive_on_causal_chains() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        // Random interior-of-cone steps so float noise cannot flip the result.
        let step = |rng: &mut ChaCha8Rng, from: &Event| -> Event {
            let dim = from.dim();
            let offset: Vec<f64> = (0..dim)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let distance = offset.iter().map(|c| c * c).sum::<f64>().sqrt();
            let dt = distance * (1.01 + rng.random_range(0.0..1.0));
            Event::new(
                from.t + dt,
                from.x.iter().zip(&offset).map(|(x, d)| x + d).collect(),
            )
        };
        for _ in 0..100_000 {
            let dim = rng.random_range(1..=3);
            let a = ev(
                rng.random_range(-3.0..3.0),
                &(0..dim)
                    .map(|_| rng.random_range(-3.0..3.0))
                    .collect::<Vec<_>>(),
            );
            let b = step(&mut rng, &a);
            let c = step(&mut rng, &b);
            assert!(precedes(&a, &b).unwrap());
            assert!(precedes(&b, &c).unwrap());
            assert!(precedes(&a, &c).unwrap(), "transitivity failed: {a:?} {b:?} {c:?}");
        }
    }

    #[test]
    fn causally_related_cases_and_symmetry() {
        let d = CausalDiamond {
            id: 1,
            request: ev(0.0, &[0.0]),
            reveal: ev(1.0, &[0.0]),
        };
        assert!(causally_related(&d, &d).unwrap());

        // Spacelike separated with short lifetimes: neither request reaches
        // the other's reveal.
        let left = CausalDiamond {
            id: 1,
            request: ev(0.0, &[-5.0]),
            reveal: ev(0.1, &[-5.0]),
        };
        let right = CausalDiamond {
            id: 2,
            request: ev(0.0, &[5.0]),
            reveal: ev(0.1, &[5.0]),
        };
        assert!(!causally_related(&left, &right).unwrap());

        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..1000 {
            let mut random_diamond = |id: usize| CausalDiamond {
                id,
                request: ev(
                    rng.random_range(-3.0..3.0),
                    &[rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)],
                ),
                reveal: ev(
                    rng.random_range(-3.0..3.0),
                    &[rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)],
                ),
            };
            let d1 = random_diamond(1);
            let d2 = random_diamond(2);
            assert_eq!(
                causally_related(&d1, &d2).unwrap(),
                causally_related(&d2, &d1).unwrap()
            );
        }
    }

    #[test]
    fn validate_accepts_single_diamond_and_chain() {
        let single = Configuration {
            dim: 1,
            start: ev(-1.0, &[0.0]),
            diamonds: vec![CausalDiamond {
                id: 1,
                request: ev(0.0, &[0.0]),
                reveal: ev(1.0, &[0.0]),
            }],
        };
        assert!(validate(&single).is_valid());
        assert!(validate(&chain_config()).is_valid());
    }

    #[test]
    fn validate_reports_unreachable_reveal() {
        let mut config = chain_config();
        config.diamonds[1].reveal = ev(-2.0, &[0.0]); // before start
        let report = validate(&config);
        assert!(!report.is_valid());
        assert!(report
            .violations
            .contains(&Violation::RevealNotReachable { id: 2 }));
        assert!(report
            .violations
            .contains(&Violation::DiamondNotCausal { id: 2 }));
    }

    #[test]
    fn validate_reports_unrelated_pair() {
        let config = Configuration {
            dim: 1,
            start: ev(-10.0, &[0.0]),
            diamonds: vec![
                CausalDiamond {
                    id: 1,
                    request: ev(0.0, &[-5.0]),
                    reveal: ev(0.1, &[-5.0]),
                },
                CausalDiamond {
                    id: 2,
                    request: ev(0.0, &[5.0]),
                    reveal: ev(0.1, &[5.0]),
                },
            ],
        };
        let report = validate(&config);
        assert_eq!(
            report.violations,
            vec![Violation::PairNotRelated {
                first: 1,
                second: 2
            }]
        );
    }

    #[test]
    fn validate_reports_duplicates_and_bad_events() {
        let mut config = chain_config();
        config.diamonds[2].id = 1;
        config.diamonds[0].request = ev(f64::NAN, &[0.0]);
        config.diamonds[3].reveal = ev(17.0, &[0.0, 0.0]);
        let report = validate(&config);
        assert!(report.violations.contains(&Violation::DuplicateId { id: 1 }));
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::NonFiniteCoordinates { place } if place == "diamond 1 request"
        )));
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::WrongDimension { place, got: 2, expected: 1 } if place == "diamond 4 reveal"
        )));
    }

    #[test]
    fn complete_graph_and_dot_output() {
        let mut config = chain_config();
        config.diamonds.pop();
        let graph = to_complete_graph(&config).unwrap();
        assert_eq!(graph.vertex_ids, vec![1, 2, 3]);
        assert_eq!(graph.edges.len(), 3);
        let dot = graph.to_dot();
        assert!(dot.starts_with("graph causal {"));
        assert!(dot.contains("  d1;\n"));
        assert!(dot.contains("  d1 -- d2;\n"));
        assert!(dot.ends_with("}\n"));

        let four = to_complete_graph(&chain_config()).unwrap();
        assert_eq!(four.edges.len(), 6);

        let mut invalid = chain_config();
        invalid.diamonds[0].reveal = ev(-5.0, &[0.0]);
        assert!(matches!(
            to_complete_graph(&invalid),
            Err(SpacetimeError::InvalidConfiguration(_))
        ));
    }

    #[test]
    fn boost_preserves_interval_and_causal_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10_000 {
            let dim = rng.random_range(1..=3);
            let coords = |rng: &mut ChaCha8Rng| -> Vec<f64> {
                (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect()
            };
            let a = ev(rng.random_range(-3.0..3.0), &coords(&mut rng));
            let b = ev(rng.random_range(-3.0..3.0), &coords(&mut rng));
            let rapidity = rng.random_range(-2.0..2.0);

            // Skip pairs within 1e−9 of the light cone; a boost may move
            // those across the boundary by float noise.
            let dt = b.t - a.t;
            let distance = a
                .x
                .iter()
                .zip(&b.x)
                .map(|(ai, bi)| (bi - ai) * (bi - ai))
                .sum::<f64>()
                .sqrt();
            if (dt - distance).abs() < 1e-9 {
                continue;
            }

            let a2 = boost(&a, rapidity).unwrap();
            let b2 = boost(&b, rapidity).unwrap();
            assert_eq!(
                precedes(&a, &b).unwrap(),
                precedes(&a2, &b2).unwrap(),
                "boost flipped causal order: {a:?} {b:?} rapidity {rapidity}"
            );

            let interval = |p: &Event, q: &Event| {
                let dt = q.t - p.t;
                let d2: f64 = p
                    .x
                    .iter()
                    .zip(&q.x)
                    .map(|(pi, qi)| (qi - pi) * (qi - pi))
                    .sum();
                dt * dt - d2
            };
            assert!(
                (interval(&a, &b) - interval(&a2, &b2)).abs() < 1e-9,
                "boost changed the interval"
            );
        }
    }

    #[test]
    fn boost_requires_a_spatial_axis() {
        assert!(matches!(
            boost(&Event::new(1.0, vec![]), 0.5),
            Err(SpacetimeError::BoostNeedsSpatialAxis)
        ));
    }

    #[test]
    fn shrinking_a_diamond_never_adds_validity() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..2000 {
            let dim = rng.random_range(1..=2);
            let coords = |rng: &mut ChaCha8Rng| -> Vec<f64> {
                (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect()
            };
            // Diamonds are built causal (request ≺ reveal); overall validity
            // still varies through C1/C2.
            let mut diamonds = Vec::new();
            for id in 1..=3 {
                let request = ev(rng.random_range(-3.0..3.0), &coords(&mut rng));
                let offset: Vec<f64> = (0..dim)
                    .map(|_| rng.random_range(-1.0..1.0))
                    .collect();
                let distance = offset.iter().map(|c| c * c).sum::<f64>().sqrt();
                let reveal = Event::new(
                    request.t + distance * (1.01 + rng.random_range(0.0..2.0)),
                    request.x.iter().zip(&offset).map(|(x, d)| x + d).collect(),
                );
                diamonds.push(CausalDiamond {
                    id,
                    request,
                    reveal,
                });
            }
            let config = Configuration {
                dim,
                start: ev(rng.random_range(-4.0..0.0), &coords(&mut rng)),
                diamonds,
            };

            let mut shrunk = config.clone();
            let pick = rng.random_range(0..3);
            let d = &mut shrunk.diamonds[pick];
            let lambda = 0.5;
            d.reveal = Event::new(
                d.request.t + lambda * (d.reveal.t - d.request.t),
                d.request
                    .x
                    .iter()
                    .zip(&d.reveal.x)
                    .map(|(y, z)| y + lambda * (z - y))
                    .collect(),
            );

            let original: std::collections::BTreeSet<_> =
                validate(&config).violations.into_iter().collect();
            let after: std::collections::BTreeSet<_> =
                validate(&shrunk).violations.into_iter().collect();
            assert!(
                original.is_subset(&after),
                "shrinking removed a violation: {original:?} vs {after:?}"
            );
        }
    }

    #[test]
    fn configuration_json_round_trip() {
        let config = chain_config();
        let json = serde_json::to_string(&config).unwrap();
        let back: Configuration = serde_json::from_str(&json).unwrap();
        assert_eq!(back, config);

        let literal = r#"{
            "dim": 2,
            "start": {"t": 0.0, "x": [0.0, 0.0]},
            "diamonds": [
                {"id": 1,
                 "request": {"t": 1.0, "x": [0.5, 0.0]},
                 "reveal": {"t": 3.0, "x": [0.5, 0.0]}}
            ]
        }"#;
        let parsed: Configuration = serde_json::from_str(literal).unwrap();
        assert_eq!(parsed.dim, 2);
        assert_eq!(parsed.diamonds[0].request.x, vec![0.5, 0.0]);
        assert!(validate(&parsed).is_valid());
    }
}
