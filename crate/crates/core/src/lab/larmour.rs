//! Splitting a diagonal `eps`-hermitian form over a ramified quaternion
//! algebra as `h1 ⊥ h2·pi_D` with unit diagonal entries, and deciding
//! isotropy from the two residue forms over `F_{p^2}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::arith::legendre;
use crate::brauer::BrauerClass;
use crate::error::{Error, Result};
use crate::fields::{FieldDesc, SquareClass};
use crate::hermitian::{herm_is_isotropic, HermFormDesc, InvolutionDesc};

use super::fp2::Fp2;
use super::pid::{PidChoice, SigmaChoice};
use super::quaternion::{Quat, QuatAlgebra};
use super::LocalField;

/// How the residue involution acts on `F_{p^2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ResidueInvolution {
    Conjugation,
    Identity,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidueForm {
    pub involution: ResidueInvolution,
    pub eps: i8,
    pub entries: Vec<Fp2>,
    pub isotropic: bool,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalizedEntry {
    pub entry: String,
    pub w: String,
    /// 1 for `h1`, 2 for `h2`.
    pub part: u8,
    pub steps: Vec<String>,
    pub residue: Fp2,
}

#[derive(Clone, Debug, Serialize)]
pub struct LarmourReport {
    pub sigma: SigmaChoice,
    pub eps: i8,
    pub pi_d: String,
    pub eps_prime: i8,
    pub entries: Vec<NormalizedEntry>,
    pub h1: ResidueForm,
    pub h2: ResidueForm,
    pub isotropic: bool,
}

/// `(b + eps sigma(b)) / 2`, which is `eps`-symmetric for any `b`.
pub fn symmetrize<F: LocalField>(alg: &QuatAlgebra<F>, sigma: SigmaChoice, eps: i8, b: &Quat<F>) -> Result<Quat<F>> {
    let sb = sigma.apply(alg, b);
    let sum = if eps == 1 { alg.add(b, &sb) } else { alg.sub(b, &sb) };
    Ok(alg.scale(&sum, &alg.a.int(2).inv()?))
}

fn residue_involution<F: LocalField>(alg: &QuatAlgebra<F>, tau: &dyn Fn(&Quat<F>) -> Quat<F>) -> Result<ResidueInvolution> {
    let alpha = alg.i();
    let r = alg.residue(&alg.mul(&tau(&alpha), &alg.inv(&alpha)?))?;
    if r.is_one() {
        Ok(ResidueInvolution::Identity)
    } else if r.neg().is_one() {
        Ok(ResidueInvolution::Conjugation)
    } else {
        Err(Error::internal(format!("residue involution sends sqrt(a) to {r} sqrt(a)")))
    }
}

fn residue_verdict(involution: ResidueInvolution, eps: i8, entries: Vec<Fp2>) -> Result<ResidueForm> {
    let n = entries.len();
    let (isotropic, reason) = match (involution, eps) {
        (ResidueInvolution::Conjugation, _) => {
            let ok = entries.iter().all(|e| if eps == 1 { e.in_base() } else { e.re == 0 });
            if !ok {
                return Err(Error::internal("residue entry is not symmetric under conjugation"));
            }
            // the norm F_{p^2} -> F_p is onto, so two entries already represent 0
            (n >= 2, format!("{}hermitian over F_p^2/F_p of rank {n}", if eps == 1 { "" } else { "skew-" }))
        }
        (ResidueInvolution::Identity, 1) => {
            let iso = match n {
                0 | 1 => false,
                2 => entries[0].mul(&entries[1]).neg().is_square(),
                _ => true,
            };
            (iso, format!("quadratic form over F_p^2 of rank {n}"))
        }
        (ResidueInvolution::Identity, _) => {
            if n > 0 {
                return Err(Error::internal("nonzero skew entry for the identity involution"));
            }
            (false, "empty".into())
        }
    };
    Ok(ResidueForm { involution, eps, entries, isotropic, reason })
}

/// Decomposes `<d_1, ..., d_n>` over `(D, sigma)`. Entries of integral `w`
/// go to `h1`, the others are multiplied by `pi_D^{-1}` on the right and go
/// to `h2` (hermitian for `Int(pi_D)∘sigma` with sign `eps·eps'`). Each entry
/// is then moved to `w = 0` by the isometries `c -> x^2 c` (`x` a power of
/// the uniformizer) and `c -> eps' pi_D^{-1} c pi_D^{-1}`, and reduced.
pub fn larmour_decompose<F: LocalField>(
    alg: &QuatAlgebra<F>,
    pid: &PidChoice<F>,
    eps: i8,
    entries: &[Quat<F>],
) -> Result<LarmourReport> {
    if eps != 1 && eps != -1 {
        return Err(Error::invalid(format!("eps must be +1 or -1, got {eps}")));
    }
    let sigma = pid.sigma;
    let pi = &pid.pi_d;
    let pi_inv = alg.inv(pi)?;
    let w_pi = alg.w(pi)?;
    let two_w_pi = (&w_pi * BigRational::from_integer(2.into())).to_integer();
    let unif = alg.a.uniformizer();
    let eps_prime = alg.a.int(pid.eps_prime as i64);

    let tau1 = |x: &Quat<F>| sigma.apply(alg, x);
    let tau2 = |x: &Quat<F>| alg.mul(&alg.mul(pi, &sigma.apply(alg, x)), &pi_inv);
    let inv1 = residue_involution(alg, &tau1)?;
    let inv2 = residue_involution(alg, &tau2)?;
    let sign2 = eps * pid.eps_prime;

    let mut normalized = Vec::new();
    let mut parts: [Vec<Fp2>; 2] = [Vec::new(), Vec::new()];
    for d in entries {
        if alg.is_zero(d) {
            return Err(Error::invalid("zero diagonal entry"));
        }
        let sd = sigma.apply(alg, d);
        let expect = if eps == 1 { d.clone() } else { alg.neg(d) };
        if !alg.eq(&sd, &expect) {
            return Err(Error::invalid(format!(
                "{} is not {}-symmetric for {sigma}; symmetrize it first",
                alg.show(d),
                if eps == 1 { "+1" } else { "-1" }
            )));
        }
        let w = alg.w(d)?;
        let mut steps = Vec::new();
        let (part, mut c) = if w.is_integer() {
            (1u8, d.clone())
        } else {
            steps.push("times pi_D^-1".to_string());
            (2u8, alg.mul(d, &pi_inv))
        };
        let mut m = alg.w(&c)?.to_integer().to_i64().ok_or_else(|| Error::invalid("valuation out of range"))?;
        if m.rem_euclid(2) == 1 {
            c = alg.scale(&alg.mul(&alg.mul(&pi_inv, &c), &pi_inv), &eps_prime);
            m -= two_w_pi.to_i64().unwrap_or(1);
            steps.push("eps' pi_D^-1 (.) pi_D^-1".to_string());
        }
        if m != 0 {
            let k = m / 2;
            let mut x = alg.a.int(1);
            let step = if k > 0 { unif.inv()? } else { unif.clone() };
            for _ in 0..k.abs() {
                x = x.mul(&step);
            }
            c = alg.scale(&c, &x.mul(&x));
            steps.push(format!("times {}^{}", unif, -2 * k));
        }
        if alg.w(&c)? != BigRational::from_integer(BigInt::from(0)) {
            return Err(Error::internal(format!("normalization of {} left w = {}", alg.show(d), alg.w(&c)?)));
        }
        let (tau, sign): (&dyn Fn(&Quat<F>) -> Quat<F>, i8) = if part == 1 { (&tau1, eps) } else { (&tau2, sign2) };
        let tc = tau(&c);
        let expect = if sign == 1 { c.clone() } else { alg.neg(&c) };
        if !alg.eq(&tc, &expect) {
            return Err(Error::internal(format!("normalized entry of {} lost its symmetry", alg.show(d))));
        }
        let r = alg.residue(&c)?;
        parts[(part - 1) as usize].push(r);
        normalized.push(NormalizedEntry {
            entry: alg.show(d),
            w: if w.is_integer() { w.to_integer().to_string() } else { format!("{}/{}", w.numer(), w.denom()) },
            part,
            steps,
            residue: r,
        });
    }
    let [p1, p2] = parts;
    let h1 = residue_verdict(inv1, eps, p1)?;
    let h2 = residue_verdict(inv2, sign2, p2)?;
    let isotropic = h1.isotropic || h2.isotropic;
    Ok(LarmourReport {
        sigma,
        eps,
        pi_d: alg.show(pi),
        eps_prime: pid.eps_prime,
        entries: normalized,
        h1,
        h2,
        isotropic,
    })
}

/// Square class of a nonzero scalar over `CDV(F_p)`.
pub fn scalar_class<F: LocalField>(k: &FieldDesc, c: &F) -> Result<SquareClass> {
    let v = c.valuation()?.ok_or_else(|| Error::invalid("zero has no square class"))?;
    let mut unit = c.clone();
    let step = if v > 0 { c.uniformizer().inv()? } else { c.uniformizer() };
    for _ in 0..v.abs() {
        unit = unit.mul(&step);
    }
    let r = unit.residue()?;
    let odd = v.rem_euclid(2) == 1;
    let nonsquare = legendre(r as i64, c.prime()) == -1;
    crate::fields::compose(k, SquareClass { unit: nonsquare as u32, vpar: 0 }, odd)
}

/// Isotropy of a form with scalar entries over `(D, γ)`, `eps = +1`, decided
/// symbolically from square classes through the hermitian engine.
pub fn symbolic_verdict<F: LocalField>(alg: &QuatAlgebra<F>, entries: &[Quat<F>]) -> Result<bool> {
    let k = FieldDesc::qp(alg.prime())?;
    let mut classes = Vec::new();
    for d in entries {
        if d.c[1..].iter().any(|c| !c.is_zero()) {
            return Err(Error::invalid(format!("{} is not a scalar", alg.show(d))));
        }
        classes.push(scalar_class(&k, &d.c[0])?);
    }
    let b = BrauerClass::symbol(k.clone(), scalar_class(&k, &alg.a)?, scalar_class(&k, &alg.b)?)?;
    herm_is_isotropic(&HermFormDesc::new(b, InvolutionDesc::Symplectic, 1, classes)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::{choose_pid, LaurentSeries, PadicRational};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn q25() -> QuatAlgebra<PadicRational> {
        QuatAlgebra::new(PadicRational::from_int(2, 5), PadicRational::from_int(5, 5)).unwrap()
    }

    fn form<F: LocalField>(alg: &QuatAlgebra<F>, s: &[&str]) -> Vec<Quat<F>> {
        s.iter().map(|e| alg.parse(e).unwrap()).collect()
    }

    #[test]
    fn canonical_one_five() {
        let alg = q25();
        let pid = choose_pid(&alg, SigmaChoice::Gamma, &alg.j()).unwrap();
        let r = larmour_decompose(&alg, &pid, 1, &form(&alg, &["1", "5"])).unwrap();
        assert_eq!(r.h1.entries.len(), 2);
        assert!(r.h2.entries.is_empty());
        assert_eq!(r.h1.involution, ResidueInvolution::Conjugation);
        // 5 -> eps' 5 / (2ij)^2 = 5/40 = 1/8, residue 2
        assert_eq!(r.entries[1].residue, Fp2::new(5, 2, 2, 0));
        assert!(r.isotropic);
        assert!(symbolic_verdict(&alg, &form(&alg, &["1", "5"])).unwrap());
    }

    #[test]
    fn single_parity_class() {
        let alg = q25();
        let pid = choose_pid(&alg, SigmaChoice::Gamma, &alg.j()).unwrap();
        let r = larmour_decompose(&alg, &pid, 1, &form(&alg, &["1", "3"])).unwrap();
        assert!(r.h2.entries.is_empty());
        assert_eq!(r.h1.entries, vec![Fp2::new(5, 2, 1, 0), Fp2::new(5, 2, 3, 0)]);
    }

    #[test]
    fn orthogonal_sanity() {
        let alg = q25();
        let pid = choose_pid(&alg, SigmaChoice::IntIGamma, &alg.j()).unwrap();
        for e in ["1", "j", "ij", "3 + j"] {
            let r = larmour_decompose(&alg, &pid, 1, &form(&alg, &[e])).unwrap();
            assert!(!r.isotropic, "<{e}>");
        }
        assert_eq!(
            larmour_decompose(&alg, &pid, 1, &form(&alg, &["j", "ij"])).unwrap().h2.involution,
            ResidueInvolution::Identity
        );
        let r = larmour_decompose(&alg, &pid, 1, &form(&alg, &["1", "j", "ij", "5"])).unwrap();
        assert!(r.isotropic);
    }

    #[test]
    fn maximal_anisotropic_ranks() {
        // u for the orthogonal involution is 3 = 1 (conjugation part) + 2
        // (quadratic part over F_25); rank 4 is always isotropic.
        let alg = q25();
        let pid = choose_pid(&alg, SigmaChoice::IntIGamma, &alg.j()).unwrap();
        let mut rng = StdRng::seed_from_u64(21);
        let mut best = 0;
        for _ in 0..300 {
            let n = rng.gen_range(1..=4);
            let entries: Vec<_> = (0..n)
                .map(|_| {
                    let b = Quat { c: std::array::from_fn(|_| alg.a.random_integral(&mut rng)) };
                    symmetrize(&alg, SigmaChoice::IntIGamma, 1, &b).unwrap()
                })
                .filter(|d| !alg.is_zero(d))
                .collect();
            let r = larmour_decompose(&alg, &pid, 1, &entries).unwrap();
            if !r.isotropic {
                best = best.max(entries.len());
            }
            if entries.len() == 4 {
                assert!(r.isotropic);
            }
        }
        assert_eq!(best, 3);
    }

    #[test]
    fn rejects_bad_entries() {
        let alg = q25();
        let pid = choose_pid(&alg, SigmaChoice::Gamma, &alg.j()).unwrap();
        assert!(matches!(larmour_decompose(&alg, &pid, 1, &form(&alg, &["i"])), Err(Error::Invalid(_))));
        assert!(matches!(larmour_decompose(&alg, &pid, 1, &[alg.zero()]), Err(Error::Invalid(_))));
        let fixed = symmetrize(&alg, SigmaChoice::Gamma, 1, &alg.parse("3 + i").unwrap()).unwrap();
        assert_eq!(fixed, alg.parse("3").unwrap());
    }

    #[test]
    fn randomized_cross_check_with_symbolic_route() {
        let alg = q25();
        let pid = choose_pid(&alg, SigmaChoice::Gamma, &alg.j()).unwrap();
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..100 {
            let n = rng.gen_range(1..=3);
            let entries: Vec<_> = (0..n)
                .map(|_| {
                    let mut c = alg.a.int(rng.gen_range(1..5));
                    for _ in 0..rng.gen_range(0..3) {
                        c = c.mul(&alg.a.uniformizer());
                    }
                    alg.scalar(c)
                })
                .collect();
            let r = larmour_decompose(&alg, &pid, 1, &entries).unwrap();
            assert_eq!(r.isotropic, symbolic_verdict(&alg, &entries).unwrap());
        }
    }

    #[test]
    fn laurent_model() {
        let z = LaurentSeries::constant_mod(5, 1, 8);
        let alg = QuatAlgebra::new(z.int(2), z.uniformizer()).unwrap();
        let pid = choose_pid(&alg, SigmaChoice::IntIGamma, &alg.j()).unwrap();
        let entries = form(&alg, &["1 + t", "j + t*j"]);
        let lo = larmour_decompose(&alg, &pid, 1, &entries).unwrap();
        assert_eq!(lo.h1.entries.len(), 1);
        assert_eq!(lo.h2.entries.len(), 1);
    }
}
