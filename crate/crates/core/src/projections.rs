//! Optional and dual optional projections on a finite filtration, and the
//! Azéma bundle of a random time.
//!
//! For a raw process `V`:
//!
//! ```text
//! (ᵒV)_t  = E[V_t | F_t]
//! V^o_t   = Σ_{s ≤ t} E[ΔV_s | F_s]          (ΔV_0 = V_0)
//! N^V     = ᵒV − V^o                          (an F-martingale, N^V_0 = 0)
//! N^V_t   = E[V_{t−1} | F_t] − V^o_{t−1}
//! ```
//!
//! For a random time `τ` with `A = 1_[τ,∞)`:
//!
//! ```text
//! Z = 1 − ᵒA,  Z̃ = 1 − ᵒ(A_−),  m = 1 − (ᵒA − A^o)
//! Z = m − A^o, Z̃ = m − A^o_−
//! ```

use serde::Serialize;

use crate::error::Result;
use crate::filtration::Filtration;
use crate::process::Process;
use crate::rational::Rational;
use crate::report::{instance_digest, CheckReport, Witness};
use crate::space::{cond_expect, SampleSpace};
use crate::time::RandomTime;

/// `(ᵒV)_t = E[V_t | F_t]`.
pub fn optional_projection(v: &Process, f: &Filtration, space: &SampleSpace) -> Result<Process> {
    v.check_shape(f.horizon(), space.len())?;
    let rows = (0..=f.horizon())
        .map(|t| cond_expect(v.at(t), f.part(t), space))
        .collect::<Result<Vec<_>>>()?;
    Process::new(rows)
}

/// `V^o_t = Σ_{s ≤ t} E[ΔV_s | F_s]` for a nondecreasing raw `V`.
pub fn dual_optional_projection(v: &Process, f: &Filtration, space: &SampleSpace) -> Result<Process> {
    v.check_shape(f.horizon(), space.len())?;
    v.require_nondecreasing()?;
    let jumps = optional_projection(&v.increments(), f, space)?;
    Ok(Process::cumulative(&jumps))
}

/// `N^V = ᵒV − V^o`.
pub fn projection_martingale(v: &Process, f: &Filtration, space: &SampleSpace) -> Result<Process> {
    let ov = optional_projection(v, f, space)?;
    let vo = dual_optional_projection(v, f, space)?;
    Ok(&ov - &vo)
}

/// `ᵒ(V_−)_t = E[V_{t−1} | F_t]`, zero at `t = 0`.
pub fn optional_projection_of_left(v: &Process, f: &Filtration, space: &SampleSpace) -> Result<Process> {
    optional_projection(&v.left_limit(), f, space)
}

/// The processes attached to a random time `τ` relative to `F`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AzemaBundle {
    /// `A_t = 1{τ ≤ t}`.
    pub a: Process,
    /// `ᵒA_t = P(τ ≤ t | F_t)`.
    pub oa: Process,
    /// Dual optional projection of `A`.
    pub ao: Process,
    /// `Z_t = P(τ > t | F_t)`.
    pub z: Process,
    /// `Z̃_t = P(τ ≥ t | F_t)`.
    pub z_tilde: Process,
    /// `m = 1 − N`.
    pub m: Process,
    /// `N = ᵒA − A^o`.
    pub n: Process,
}

pub fn azema_bundle(tau: &RandomTime, f: &Filtration, space: &SampleSpace) -> Result<AzemaBundle> {
    tau.validate(space.len(), f.horizon())?;
    let horizon = f.horizon();
    let n_out = space.len();
    let a = Process::indicator_from(tau, horizon);
    let oa = optional_projection(&a, f, space)?;
    let ao = dual_optional_projection(&a, f, space)?;
    let one = Process::constant(horizon, n_out, Rational::ONE);
    let z = &one - &oa;
    let z_tilde = &one - &optional_projection_of_left(&a, f, space)?;
    let n = &oa - &ao;
    let m = &one - &n;
    Ok(AzemaBundle {
        a,
        oa,
        ao,
        z,
        z_tilde,
        m,
        n,
    })
}

fn first_row_mismatch(
    left: &Process,
    right: impl Fn(usize) -> Vec<Rational>,
) -> Option<(usize, usize, Rational, Rational)> {
    for t in 0..=left.horizon() {
        let r = right(t);
        if let Some(w) = (0..left.num_outcomes()).find(|&w| left.get(t, w) != r[w]) {
            return Some((t, w, left.get(t, w), r[w]));
        }
    }
    None
}

/// Three-way equivalence for a nondecreasing raw `V`:
///
/// * (i) `ᵒ(V_−)_t = V^o_{t−1}` for all t;
/// * (ii) `ᵒ(V_−)_t = ᵒV_{t−1}` for all t, also tested in its predictable
///   form: `ᵒ(V_−)_t` constant on the blocks of `F_{t−1}`;
/// * (iii) `ᵒV = V^o`.
///
/// Each condition is computed from its own ingredients; the report agrees iff
/// all verdicts coincide.
pub fn hloc_check(v: &Process, f: &Filtration, space: &SampleSpace) -> Result<CheckReport> {
    let digest = instance_digest(space, &[f], &[], &[v]);
    let ov = optional_projection(v, f, space)?;
    let vo = dual_optional_projection(v, f, space)?;
    let o_left = optional_projection_of_left(v, f, space)?;
    let mut report = CheckReport::new("hloc", digest);

    let cond_i = first_row_mismatch(&o_left, |t| vo.prev(t));
    let cond_ii = first_row_mismatch(&o_left, |t| ov.prev(t));
    let cond_ii_pred = (1..=f.horizon()).find_map(|t| {
        f.part(t - 1)
            .first_non_measurable(o_left.at(t))
            .map(|w| (t, w))
    });
    let cond_iii = first_row_mismatch(&ov, |t| vo.at(t).to_vec());

    if let Some((t, w, l, r)) = cond_i {
        report.offer_witness(
            Witness::new("(i) °(V-) = V°-")
                .at(t, w)
                .value("°(V-)", l)
                .value("V°-", r),
        );
    }
    if let Some((t, w, l, r)) = cond_ii {
        report.offer_witness(
            Witness::new("(ii) °(V-) = °V-")
                .at(t, w)
                .value("°(V-)", l)
                .value("°V-", r),
        );
    }
    if let Some((t, w)) = cond_ii_pred {
        report.offer_witness(
            Witness::new("(ii') °(V-) predictable")
                .at(t, w)
                .block(f.part(t - 1).block_containing(w))
                .value("°(V-)", o_left.get(t, w)),
        );
    }
    if let Some((t, w, l, r)) = cond_iii {
        report.offer_witness(
            Witness::new("(iii) °V = V°")
                .at(t, w)
                .value("°V", l)
                .value("V°", r),
        );
    }
    report
        .condition("(i) °(V-) = V°-", cond_i.is_none())
        .condition("(ii) °(V-) = °V-", cond_ii.is_none())
        .condition("(ii') °(V-) predictable", cond_ii_pred.is_none())
        .condition("(iii) °V = V°", cond_iii.is_none());
    Ok(report)
}
