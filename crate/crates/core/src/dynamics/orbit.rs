use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::family::escape_certified;
use super::trap::TrapLibrary;
use crate::dyadic::{Padic2, Rational2, ValExponent, DEFAULT_PRECISION};
use crate::geometry::Disk;
use crate::poly::FamilyMember;

/// Iterate logs in reports keep at most this many entries.
pub const ORBIT_LOG_LIMIT: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrbitClass {
    /// Iterate `at_iterate` is certified to run off to infinity.
    Escapes {
        at_iterate: usize,
    },
    /// `z_preperiod = z_{preperiod + period}`, exactly.
    Preperiodic {
        preperiod: usize,
        period: usize,
    },
    /// Iterate `entry_iterate` lies in a disk of the named trap.
    TrappedQ2 {
        trap_id: String,
        entry_iterate: usize,
    },
    Unknown {
        max_iterates_used: usize,
    },
}

impl OrbitClass {
    /// `Some(true)` for bounded orbits, `Some(false)` for escaping ones.
    pub fn bounded(&self) -> Option<bool> {
        match self {
            OrbitClass::Escapes { .. } => Some(false),
            OrbitClass::Preperiodic { .. } | OrbitClass::TrappedQ2 { .. } => Some(true),
            OrbitClass::Unknown { .. } => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.bounded().is_some()
    }
}

#[derive(Clone, Debug)]
pub struct OrbitOptions {
    pub max_iters: usize,
    /// Relative precision, in bits, once iteration leaves exact arithmetic.
    pub precision: u32,
    /// Switch to 2-adic balls when numerator plus denominator exceed this many bits.
    pub height_cap_bits: u64,
    pub traps: Arc<TrapLibrary>,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions {
            max_iters: 10_000,
            precision: DEFAULT_PRECISION,
            height_cap_bits: 4096,
            traps: Arc::new(TrapLibrary::seeded()),
        }
    }
}

/// One step of an orbit: exact while heights stay small, a 2-adic ball afterwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Iterate {
    Exact(Rational2),
    Ball(Padic2),
}

impl Iterate {
    pub fn val(&self) -> Option<i64> {
        match self {
            Iterate::Exact(z) => z.val().finite(),
            Iterate::Ball(b) => b.val(),
        }
    }

    pub fn in_disk(&self, d: &Disk) -> bool {
        match self {
            Iterate::Exact(z) => d.contains(z),
            Iterate::Ball(b) => d.contains_ball(b),
        }
    }

    fn log_entry(&self) -> String {
        match self {
            Iterate::Exact(z) => z.to_string(),
            Iterate::Ball(b) => b.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointReport {
    pub t: Rational2,
    pub z: Rational2,
    pub class: OrbitClass,
    /// The first iterates `z_0, z_1, ...`, at most [`ORBIT_LOG_LIMIT`].
    pub iterates: Vec<String>,
    pub iterates_truncated: bool,
    /// `v2` of the iterate that triggered the escape rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub escape_valuation: Option<i64>,
    /// The trap disk the orbit entered.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trap_disk: Option<Disk>,
    /// Iterate index where exact arithmetic gave way to 2-adic balls.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switched_to_balls_at: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

/// Follow the orbit of `z` under `f` until it is certified to escape, to be
/// preperiodic, or to enter a trap valid for `f.t`.
pub fn classify_point_orbit(f: &FamilyMember, z: &Rational2, opts: &OrbitOptions) -> PointReport {
    let t_val = f.t.val();
    let traps: Vec<_> = opts
        .traps
        .snapshot()
        .into_iter()
        .filter(|c| c.applies_to(&f.t))
        .collect();
    let mut report = PointReport {
        t: f.t.clone(),
        z: z.clone(),
        class: OrbitClass::Unknown {
            max_iterates_used: 0,
        },
        iterates: Vec::new(),
        iterates_truncated: false,
        escape_valuation: None,
        trap_disk: None,
        switched_to_balls_at: None,
        diagnostic: None,
    };
    let mut seen: HashMap<Rational2, usize> = HashMap::new();
    let mut cur = Iterate::Exact(z.clone());
    for i in 0..=opts.max_iters {
        if report.iterates.len() < ORBIT_LOG_LIMIT {
            report.iterates.push(cur.log_entry());
        } else {
            report.iterates_truncated = true;
        }
        if let Iterate::Exact(x) = &cur {
            if let Some(&j) = seen.get(x) {
                report.class = OrbitClass::Preperiodic {
                    preperiod: j,
                    period: i - j,
                };
                return report;
            }
            seen.insert(x.clone(), i);
        }
        if let Some(v) = cur.val() {
            if escape_certified(t_val, v) {
                report.class = OrbitClass::Escapes { at_iterate: i };
                report.escape_valuation = Some(v);
                return report;
            }
        }
        for trap in &traps {
            if let Some(d) = trap.disks().find(|d| cur.in_disk(d)) {
                report.class = OrbitClass::TrappedQ2 {
                    trap_id: trap.id.clone(),
                    entry_iterate: i,
                };
                report.trap_disk = Some(d.clone());
                return report;
            }
        }
        if i == opts.max_iters {
            break;
        }
        cur = match cur {
            Iterate::Exact(x) => {
                let y = f.eval(&x);
                if y.height_bits() > opts.height_cap_bits {
                    report.switched_to_balls_at = Some(i + 1);
                    seen.clear();
                    Iterate::Ball(Padic2::from_rational(&y, opts.precision))
                } else {
                    Iterate::Exact(y)
                }
            }
            Iterate::Ball(b) => {
                let y = f.eval_padic(&b, opts.precision);
                if y.abs_prec() <= ValExponent::Finite(-2) && y.is_zero() {
                    report.class = OrbitClass::Unknown {
                        max_iterates_used: i + 1,
                    };
                    report.diagnostic = Some(format!("precision exhausted at iterate {}", i + 1));
                    return report;
                }
                Iterate::Ball(y)
            }
        };
    }
    report.class = OrbitClass::Unknown {
        max_iterates_used: opts.max_iters,
    };
    report.diagnostic = Some("iteration budget exhausted".into());
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn run(t: i64, z: Rational2) -> PointReport {
        classify_point_orbit(&FamilyMember::new(q(t, 1)), &z, &OrbitOptions::default())
    }

    #[test]
    fn critical_point_of_f1_lands_on_fixed_point() {
        let r = run(1, Rational2::one());
        assert_eq!(
            r.class,
            OrbitClass::Preperiodic {
                preperiod: 1,
                period: 1
            }
        );
        assert_eq!(r.iterates, vec!["1", "-1/2", "-1/2"]);
    }

    #[test]
    fn escapes() {
        let r = run(3, Rational2::one());
        assert_eq!(r.class, OrbitClass::Escapes { at_iterate: 2 });
        assert_eq!(r.iterates, vec!["1", "-7/2", "-2201/4"]);
        let r = run(1, q(5, 2));
        assert_eq!(r.class, OrbitClass::Escapes { at_iterate: 1 });
        assert_eq!(r.iterates[1], "79/4");
        assert_eq!(r.escape_valuation, Some(-2));
    }

    #[test]
    fn trapped_points() {
        let r = run(1, q(19, 2));
        assert!(matches!(
            r.class,
            OrbitClass::TrappedQ2 {
                entry_iterate: 0,
                ..
            }
        ));
        assert_eq!(r.trap_disk, Some("19/2:4".parse::<Disk>().unwrap()));
        let r = run(33, q(27, 2));
        assert!(matches!(r.class, OrbitClass::TrappedQ2 { .. }));
        let r = run(17, q(19, 2));
        assert!(!matches!(r.class, OrbitClass::TrappedQ2 { .. }));
    }

    #[test]
    fn constant_map_is_preperiodic() {
        let r = run(0, q(5, 1));
        assert_eq!(
            r.class,
            OrbitClass::Preperiodic {
                preperiod: 1,
                period: 1
            }
        );
    }

    #[test]
    fn report_json_round_trip() {
        let r = run(1, q(19, 2));
        let js = serde_json::to_string(&r).unwrap();
        assert!(js.contains("\"kind\":\"trapped_q2\""), "{js}");
        let back: PointReport = serde_json::from_str(&js).unwrap();
        assert_eq!(back, r);
    }
}
