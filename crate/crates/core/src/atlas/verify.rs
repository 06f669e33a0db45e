use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::trace::{Claim, VerifierTrace};
use crate::dyadic::{Rational2, ValExponent};
use crate::dynamics::{
    escape_certified, family_c2_image, family_disk_map, family_q2_image, first_critical_image,
    pcf_parameter, standard_trap, ParamScope,
};
use crate::error::{Error, Result};
use crate::geometry::{disk_image, disk_sup_norm, residue_disk_map, Disk};
use crate::poly::{critical_cubic, FamilyMember};
use crate::q;

pub const THM_UNBDD: &str = "thm-unbdd";
pub const THM_Q2BDD: &str = "thm-q2bdd";
pub const THM_BDD: &str = "thm-bdd";
pub const PROP_JULIA_UNBOUNDED: &str = "prop-julia-unbounded";
pub const PROP_JULIA_BOUNDED: &str = "prop-julia-bounded";

/// Default working precision of [`verify_thm_bdd`] when replayed from an id.
pub const THM_BDD_DEFAULT_PRECISION: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JuliaFamily {
    Unbounded,
    Bounded,
}

impl fmt::Display for JuliaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JuliaFamily::Unbounded => "unbounded",
            JuliaFamily::Bounded => "bounded",
        })
    }
}

impl FromStr for JuliaFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unbounded" => Ok(JuliaFamily::Unbounded),
            "bounded" => Ok(JuliaFamily::Bounded),
            _ => Err(Error::Parse(format!(
                "expected `unbounded` or `bounded`, got `{s}`"
            ))),
        }
    }
}

fn fail(step: usize, detail: impl Into<String>) -> Error {
    Error::Verification {
        step,
        detail: detail.into(),
    }
}

fn half_shift(c: i64, e: i64) -> Rational2 {
    // -1/2 + c 2^e
    &q(-1, 2) + &(&Rational2::from(c) * &Rational2::pow2(e))
}

/// Escaping parameter disk `D̄(1 + 2^(2n-1), 2^-2n)`.
pub fn mandel_escape_disk(n: u32) -> Disk {
    let n = n as i64;
    Disk::new(&Rational2::one() + &Rational2::pow2(2 * n - 1), 2 * n)
}

/// Parameter disk `D̄(1 + c 2^2n, 2^-(2n+3))` for `c = 5` (family a) or `7` (family b).
pub fn mandel_trap_disk(c: i64, n: u32) -> Disk {
    let n = n as i64;
    Disk::new(
        &Rational2::one() + &(&Rational2::from(c) * &Rational2::pow2(2 * n)),
        2 * n + 3,
    )
}

/// Escaping dynamical disk `D̄(-1/2 + 2^2n, 2^-(2n+1))` of `f_1`.
pub fn julia_escape_disk(n: u32) -> Disk {
    let n = n as i64;
    Disk::new(half_shift(1, 2 * n), 2 * n + 1)
}

/// Dynamical disk `D̄(-1/2 + c 2^(2n+1), 2^-(2n+4))` for `c = 5` or `7`.
pub fn julia_trap_disk(c: i64, n: u32) -> Disk {
    let n = n as i64;
    Disk::new(half_shift(c, 2 * n + 1), 2 * n + 4)
}

/// Nearest integer to `2n/3`.
pub fn trap_exponent(n: u32) -> i64 {
    (2 * n as i64 + 1) / 3
}

/// `ceil(8n/3) + 2`.
pub fn pcf_radius_exponent(n: u32) -> i64 {
    (8 * n as i64 + 2) / 3 + 2
}

/// Parameters near `T_n` escape: the critical orbit moves away from `-1/2`
/// by a factor 4 per step and leaves the unit disk at iterate `n + 1`.
pub fn verify_thm_unbdd(n: u32) -> Result<VerifierTrace> {
    if n < 1 {
        return Err(Error::Domain(format!(
            "{THM_UNBDD} holds for n >= 1, got {n}"
        )));
    }
    let tn = mandel_escape_disk(n);
    let scope = ParamScope::disk(tn.clone());
    let mut trace = VerifierTrace::new(THM_UNBDD, n);
    trace.disks.insert("T_n".into(), tn.clone());
    let mut cur = first_critical_image(&tn);
    trace.push(
        "first_critical_image",
        vec![tn.to_string()],
        Claim::Contains {
            quantity: "f_t(1)".into(),
            disk: cur.clone(),
        },
    );
    for m in 1..=n as i64 + 1 {
        if m > 1 {
            let img = family_c2_image(&scope, &cur)
                .map_err(|e| fail(trace.steps.len(), e.to_string()))?;
            trace.push(
                "family_c2_image",
                vec![scope.to_string(), cur.to_string()],
                Claim::Contains {
                    quantity: format!("f_t^{m}(1)"),
                    disk: img.disk.clone(),
                },
            );
            cur = img.disk;
        }
        let shifted = Disk::new(&cur.center + &q(1, 2), cur.rexp);
        let expected = 2 * n as i64 - 2 * m;
        match shifted.constant_val() {
            Some(v) if v == expected => trace.push(
                "constant_val",
                vec![shifted.to_string()],
                Claim::AbsEquals {
                    quantity: format!("f_t^{m}(1) + 1/2"),
                    log2: -v,
                },
            ),
            other => {
                return Err(fail(
                    trace.steps.len(),
                    format!(
                        "|f_t^{m}(1) + 1/2| should be 2^{}, disk {shifted} gives {other:?}",
                        -expected
                    ),
                ))
            }
        }
    }
    let escape_iterate = n as i64 + 1;
    let vt = scope.t_val().expect("unit parameters");
    match cur.constant_val() {
        Some(v) if escape_certified(vt, v) => {
            trace.push(
                "escape_certified",
                vec![cur.to_string()],
                Claim::AbsEquals {
                    quantity: format!("f_t^{escape_iterate}(1)"),
                    log2: -v,
                },
            );
            trace.facts.insert("escape_iterate".into(), escape_iterate);
            trace.facts.insert("escape_abs_log2".into(), -v);
        }
        other => {
            return Err(fail(
                trace.steps.len(),
                format!(
                "iterate {escape_iterate} lies in {cur} (valuation {other:?}), escape rule not met"
            ),
            ))
        }
    }
    Ok(trace)
}

fn certify_map(
    trace: &mut VerifierTrace,
    scope: &ParamScope,
    src: &Disk,
    tgt: &Disk,
    map: &str,
) -> Result<()> {
    let cert = family_disk_map(scope, src, tgt);
    if !cert.is_certified() {
        return Err(fail(
            trace.steps.len(),
            format!(
                "{map} does not map {src} into {tgt} for t in {scope}: {:?}",
                cert.witness
            ),
        ));
    }
    trace.push(
        "family_disk_map",
        vec![scope.to_string(), src.to_string(), tgt.to_string()],
        Claim::Maps {
            map: map.into(),
            source: src.clone(),
            target: tgt.clone(),
        },
    );
    Ok(())
}

/// The first three critical iterates for `t` in the family-`c` disk at level `n`,
/// each checked against the closed forms `-1/2 + c_i 2^e_i`.
fn first_three(trace: &mut VerifierTrace, c: i64, n: u32, var: &str) -> Result<Vec<Disk>> {
    let ni = n as i64;
    let coeffs = if c == 5 { [1, 7, 5] } else { [3, 5, 7] };
    let expected = [
        Disk::new(half_shift(coeffs[0], 2 * ni - 1), 2 * ni + 2),
        Disk::new(half_shift(coeffs[1], 2 * ni - 3), 2 * ni),
        Disk::new(half_shift(coeffs[2], 2 * ni - 5), 2 * ni - 2),
    ];
    let params = mandel_trap_disk(c, n);
    let scope = ParamScope::disk(params.clone());
    let first = first_critical_image(&params);
    if !expected[0].contains_disk(&first) {
        return Err(fail(
            trace.steps.len(),
            format!("f_{var}(1) lies in {first}, not in {}", expected[0]),
        ));
    }
    trace.push(
        "first_critical_image",
        vec![params.to_string()],
        Claim::Contains {
            quantity: format!("f_{var}(1)"),
            disk: first.clone(),
        },
    );
    for i in 0..2 {
        certify_map(
            trace,
            &scope,
            &expected[i],
            &expected[i + 1],
            &format!("f_{var}"),
        )?;
        trace.push(
            "compose",
            vec![],
            Claim::Contains {
                quantity: format!("f_{var}^{}(1)", i + 2),
                disk: expected[i + 1].clone(),
            },
        );
    }
    Ok(expected.to_vec())
}

fn trap_step(trace: &mut VerifierTrace, scope: &ParamScope, d: &Disk) -> Result<()> {
    let trap = standard_trap();
    let Some(td) = trap.disk_containing_disk(d) else {
        return Err(fail(
            trace.steps.len(),
            format!("{d} is not inside a disk of {}", trap.id),
        ));
    };
    if !trap.scope.contains_scope(scope) || !trap.replay() {
        return Err(fail(
            trace.steps.len(),
            format!("{} does not apply to {scope}", trap.id),
        ));
    }
    trace.push(
        "standard_trap",
        vec![scope.to_string(), d.to_string()],
        Claim::Trapped {
            disk: td.clone(),
            trap_id: trap.id.clone(),
        },
    );
    Ok(())
}

fn q2bdd_family(trace: &mut VerifierTrace, c: i64, n: u32) -> Result<()> {
    let name = if c == 5 { "a" } else { "b" };
    let params = mandel_trap_disk(c, n);
    trace.disks.insert(format!("D_{name},{n}"), params.clone());
    let scope = ParamScope::disk(params.clone());
    let chain = first_three(trace, c, n, "t")?;
    if n == 3 {
        return trap_step(trace, &scope, &chain[2]);
    }

    // compare with the opposite family one level up
    let opp = 12 - c;
    let opp_name = if opp == 5 { "a" } else { "b" };
    let params0 = mandel_trap_disk(opp, n - 1);
    trace
        .disks
        .insert(format!("D_{opp_name},{}", n - 1), params0.clone());
    let scope0 = ParamScope::disk(params0.clone());
    let diff = Disk::new(
        &params.center - &params0.center,
        params.rexp.min(params0.rexp),
    );
    let lag = 2 * n as i64 - 2;
    if diff.constant_val() != Some(lag) {
        return Err(fail(
            trace.steps.len(),
            format!("|t - t0| is not 2^-{lag}: {diff}"),
        ));
    }
    trace.push(
        "constant_val",
        vec![params.to_string(), params0.to_string()],
        Claim::AbsEquals {
            quantity: "t - t0".into(),
            log2: -lag,
        },
    );
    let chain0 = first_three(trace, opp, n - 1, "t0")?;
    if chain0[1] != chain[2] {
        return Err(fail(
            trace.steps.len(),
            format!("f_t^3(1) in {} but f_t0^2(1) in {}", chain[2], chain0[1]),
        ));
    }

    // perturbation steps: both f_t and f_t0 send W_m into W_(m+1), radius x4
    let mut w = chain[2].clone();
    for m in 3..n as i64 {
        if !w.center.congruent(&q(1, 2), 0) || w.rexp > lag {
            return Err(fail(
                trace.steps.len(),
                format!("perturbation bound does not apply on {w}"),
            ));
        }
        let sup = disk_sup_norm(&critical_cubic(), &w);
        if !sup.at_least(-1) {
            return Err(fail(
                trace.steps.len(),
                format!("sup of -2z^3+3z^2 on {w} exceeds 2"),
            ));
        }
        trace.push(
            "disk_sup_norm",
            vec!["-2z^3+3z^2".into(), w.to_string()],
            Claim::AbsAtMost {
                quantity: format!("-2z^3+3z^2 on {w}"),
                log2: -sup.finite().unwrap_or(i64::MAX).min(1),
            },
        );
        let img =
            family_q2_image(&scope0, &w).map_err(|e| fail(trace.steps.len(), e.to_string()))?;
        let next = Disk::new(img.center, w.rexp - 2).canonical();
        certify_map(trace, &scope0, &w, &next, "f_t0")?;
        certify_map(trace, &scope, &w, &next, "f_t")?;
        trace.push(
            "compose",
            vec![],
            Claim::Contains {
                quantity: format!("f_t^{}(1), f_t0^{m}(1)", m + 1),
                disk: next.clone(),
            },
        );
        w = next;
    }
    trap_step(trace, &scope, &w)
}

/// `Q_2` parameters in `D_{a,n}` and `D_{b,n}` have bounded critical orbits.
pub fn verify_thm_q2bdd(n: u32) -> Result<VerifierTrace> {
    if n < 3 {
        return Err(Error::Domain(format!(
            "{THM_Q2BDD} holds for n >= 3, got {n}"
        )));
    }
    let mut trace = VerifierTrace::new(THM_Q2BDD, n);
    q2bdd_family(&mut trace, 5, n)?;
    q2bdd_family(&mut trace, 7, n)?;
    Ok(trace)
}

struct BddRun {
    steps: Vec<(Disk, Disk)>,
    final_disk: Disk,
}

fn bdd_iterates(t_center: &Rational2, m: i64, k: i64, n: u32) -> Result<BddRun> {
    let scope = ParamScope::disk(Disk::new(t_center.clone(), m));
    let mut cur = Disk::new(Rational2::zero(), k);
    let mut steps = Vec::new();
    for _ in 0..n {
        let img = family_c2_image(&scope, &cur)?.disk.canonical();
        steps.push((cur, img.clone()));
        cur = img;
    }
    Ok(BddRun {
        steps,
        final_disk: cur,
    })
}

/// Parameters within `2^-(ceil(8n/3)+2)` of the period-`n` PCF parameter
/// `t_n` are post-critically bounded: `f_t^n` maps `D̄(0, 2^-k)` into itself.
pub fn verify_thm_bdd(n: u32, precision: u32) -> Result<VerifierTrace> {
    if n < 3 {
        return Err(Error::Domain(format!(
            "{THM_BDD} holds for n >= 3, got {n}"
        )));
    }
    let pcf = pcf_parameter(n as usize, precision)?;
    let k = trap_exponent(n);
    let m = pcf_radius_exponent(n);
    let mut trace = VerifierTrace::new(THM_BDD, n);
    trace.precision = Some(precision);
    if !pcf.t_abs_prec.at_least(m) {
        return Err(fail(
            0,
            format!("t_n known only to {:?} bits, need {m}", pcf.t_abs_prec),
        ));
    }
    let params = Disk::new(pcf.t_approx.clone(), m).canonical();
    trace.disks.insert("D(t_n)".into(), params.clone());
    let home = Disk::new(Rational2::zero(), k);
    trace.disks.insert("D(0, 2^-k)".into(), home.clone());
    trace.push(
        "pcf_parameter",
        vec![n.to_string(), precision.to_string()],
        Claim::AbsEquals {
            quantity: "t_n - 1".into(),
            log2: -pcf.s_val,
        },
    );
    trace.push(
        "pcf_parameter",
        vec![n.to_string(), precision.to_string()],
        Claim::Contains {
            quantity: format!("f_t_n^{n}(0)"),
            disk: Disk::new(Rational2::zero(), pcf.verified_bits.min(precision as i64)),
        },
    );

    let run =
        bdd_iterates(&pcf.t_approx, m, k, n).map_err(|e| fail(trace.steps.len(), e.to_string()))?;
    for (i, (src, img)) in run.steps.iter().enumerate() {
        trace.push(
            "family_c2_image",
            vec![params.to_string(), src.to_string()],
            Claim::Contains {
                quantity: format!("f_t^{}(D(0, 2^-{k}))", i + 1),
                disk: img.clone(),
            },
        );
    }
    if !home.contains_disk(&run.final_disk) {
        return Err(fail(
            trace.steps.len(),
            format!(
                "f_t^{n}(D(0, 2^-{k})) lies in {}, not inside {home}",
                run.final_disk
            ),
        ));
    }
    trace.push(
        "contains_disk",
        vec![home.to_string(), run.final_disk.to_string()],
        Claim::Maps {
            map: format!("f_t^{n}"),
            source: home.clone(),
            target: run.final_disk.clone(),
        },
    );

    // largest parameter disk (smallest exponent) the same check certifies
    let mut minimal = m;
    while minimal > 1 && pcf.t_abs_prec.at_least(minimal - 1) {
        match bdd_iterates(&pcf.t_approx, minimal - 1, k, n) {
            Ok(r) if home.contains_disk(&r.final_disk) => minimal -= 1,
            _ => break,
        }
    }
    let exps: Vec<i64> = run.steps.iter().map(|(_, d)| d.rexp).collect();
    let f = &mut trace.facts;
    f.insert("k".into(), k);
    f.insert("radius_exponent".into(), m);
    f.insert("minimal_radius_exponent".into(), minimal);
    f.insert("step1_exponent".into(), exps[0]);
    f.insert("step2_exponent".into(), exps[1]);
    f.insert("final_exponent".into(), run.final_disk.rexp);
    f.insert(
        "stated_final_exponent".into(),
        4 * k - 1 - 2 * (n as i64 - 2),
    );
    f.insert(
        "verified_bits".into(),
        pcf.verified_bits.min(precision as i64),
    );
    Ok(trace)
}

/// Disks near the repelling fixed point `-1/2` of `f_1`: the escaping
/// sequence `D_n`, or the two `Q_2`-bounded sequences `D_{a,n}`, `D_{b,n}`.
pub fn verify_prop_julia(which: JuliaFamily, n: u32) -> Result<VerifierTrace> {
    let f1 = FamilyMember::new(Rational2::one());
    match which {
        JuliaFamily::Unbounded => {
            let mut trace = VerifierTrace::new(PROP_JULIA_UNBOUNDED, n);
            trace.disks.insert("D_n".into(), julia_escape_disk(n));
            for j in (1..=n).rev() {
                let (src, tgt) = (julia_escape_disk(j), julia_escape_disk(j - 1));
                let img = disk_image(&f1.poly, &src)
                    .map_err(|e| fail(trace.steps.len(), e.to_string()))?;
                if !tgt.contains_disk(&img.disk) {
                    return Err(fail(
                        trace.steps.len(),
                        format!("f_1({src}) = {} is not inside {tgt}", img.disk),
                    ));
                }
                trace.push(
                    "disk_image",
                    vec!["f_1".into(), src.to_string()],
                    Claim::Maps {
                        map: "f_1".into(),
                        source: src,
                        target: tgt,
                    },
                );
            }
            let d0 = julia_escape_disk(0);
            let img =
                disk_image(&f1.poly, &d0).map_err(|e| fail(trace.steps.len(), e.to_string()))?;
            match img.disk.constant_val() {
                Some(v) if v == -2 && escape_certified(ValExponent::Finite(0), v) => {
                    trace.push(
                        "disk_image",
                        vec!["f_1".into(), d0.to_string()],
                        Claim::AbsEquals {
                            quantity: format!("f_1^{}(z), z in D_n", n + 1),
                            log2: 2,
                        },
                    );
                    trace.facts.insert("escape_iterate".into(), n as i64 + 1);
                }
                other => {
                    return Err(fail(
                        trace.steps.len(),
                        format!(
                            "f_1(D_0) = {} has valuation {other:?}, expected -2",
                            img.disk
                        ),
                    ))
                }
            }
            Ok(trace)
        }
        JuliaFamily::Bounded => {
            let mut trace = VerifierTrace::new(PROP_JULIA_BOUNDED, n);
            trace.disks.insert("D_a,n".into(), julia_trap_disk(5, n));
            trace.disks.insert("D_b,n".into(), julia_trap_disk(7, n));
            for j in (1..=n).rev() {
                for (c, c_next) in [(5, 7), (7, 5)] {
                    let (src, tgt) = (julia_trap_disk(c, j), julia_trap_disk(c_next, j - 1));
                    let cert = residue_disk_map(&f1.poly, &src, &tgt);
                    if !cert.is_certified() {
                        return Err(fail(
                            trace.steps.len(),
                            format!("f_1 does not map {src} into {tgt}: {:?}", cert.witness),
                        ));
                    }
                    trace.push(
                        "residue_disk_map",
                        vec!["f_1".into(), src.to_string(), tgt.to_string()],
                        Claim::Maps {
                            map: "f_1".into(),
                            source: src,
                            target: tgt,
                        },
                    );
                }
            }
            let scope = ParamScope::point(Rational2::one());
            trap_step(&mut trace, &scope, &julia_trap_disk(5, 0))?;
            trap_step(&mut trace, &scope, &julia_trap_disk(7, 0))?;
            Ok(trace)
        }
    }
}

/// Re-run the verifier named by a trace.
pub(crate) fn rerun(trace: &VerifierTrace) -> Result<VerifierTrace> {
    verify_by_id(&trace.theorem_id, trace.n, trace.precision)
}

/// Dispatch on the theorem ids used in traces and on the command line.
pub fn verify_by_id(theorem_id: &str, n: u32, precision: Option<u32>) -> Result<VerifierTrace> {
    match theorem_id {
        THM_UNBDD => verify_thm_unbdd(n),
        THM_Q2BDD => verify_thm_q2bdd(n),
        THM_BDD => verify_thm_bdd(n, precision.unwrap_or(THM_BDD_DEFAULT_PRECISION)),
        PROP_JULIA_UNBOUNDED => verify_prop_julia(JuliaFamily::Unbounded, n),
        PROP_JULIA_BOUNDED => verify_prop_julia(JuliaFamily::Bounded, n),
        other => Err(Error::Parse(format!(
            "unknown theorem id `{other}`; expected one of {THM_UNBDD}, {THM_Q2BDD}, {THM_BDD}, \
             {PROP_JULIA_UNBOUNDED}, {PROP_JULIA_BOUNDED}"
        ))),
    }
}
