//! Catalog of compact, simply connected rank-one symmetric spaces and the
//! scalar parameters every downstream computation is expressed in.

use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::gamma_half_integer;
use crate::rational::{rat, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Sphere,
    ComplexProjective,
    QuaternionicProjective,
    CayleyPlane,
}

/// A rank-one symmetric space reduced to its dimension, restricted root
/// multiplicities and root scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootData {
    pub family: Family,
    /// `m` for `S^m`, `n` for `CP^n` and `HP^n`, 2 for the Cayley plane.
    pub size: u32,
    /// Real dimension.
    pub m: u32,
    /// Multiplicity of the long root β.
    pub m_beta: u32,
    /// Multiplicity of β/2; zero exactly for spheres.
    pub m_half: u32,
    /// Root scale β(iH₀).
    #[serde(rename = "B")]
    pub b: f64,
}

/// Builds a catalog entry with root scale 1.
pub fn make_space(family: Family, size: u32) -> Result<RootData> {
    let (m, m_beta, m_half) = match family {
        Family::Sphere => {
            if size < 2 {
                return Err(Error::InvalidParameter(format!(
                    "sphere dimension must be at least 2, got {size}"
                )));
            }
            (size, size - 1, 0)
        }
        Family::ComplexProjective => {
            if size < 1 {
                return Err(Error::InvalidParameter(
                    "CP^n needs n >= 1".to_string(),
                ));
            }
            (2 * size, 1, 2 * size - 2)
        }
        Family::QuaternionicProjective => {
            if size < 1 {
                return Err(Error::InvalidParameter(
                    "HP^n needs n >= 1".to_string(),
                ));
            }
            (4 * size, 3, 4 * size - 4)
        }
        Family::CayleyPlane => (16, 7, 8),
    };
    let size = if family == Family::CayleyPlane { 2 } else { size };
    Ok(RootData {
        family,
        size,
        m,
        m_beta,
        m_half,
        b: 1.0,
    })
}

impl RootData {
    pub fn with_scale(mut self, b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "root scale B must be positive, got {b}"
            )));
        }
        self.b = b;
        Ok(self)
    }

    /// Short selector name such as `S3`, `CP2` or `OP2`.
    pub fn name(&self) -> String {
        match self.family {
            Family::Sphere => format!("S{}", self.size),
            Family::ComplexProjective => format!("CP{}", self.size),
            Family::QuaternionicProjective => format!("HP{}", self.size),
            Family::CayleyPlane => "OP2".to_string(),
        }
    }

    /// Checks the structural invariants of the record.
    pub fn validate(&self) -> Result<()> {
        if self.m != self.m_beta + self.m_half + 1 {
            return Err(Error::InvalidParameter(format!(
                "{}: m = {} but m_beta + m_half + 1 = {}",
                self.name(),
                self.m,
                self.m_beta + self.m_half + 1
            )));
        }
        let sphere = self.family == Family::Sphere;
        if sphere != (self.m_half == 0) || !self.m_half.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "{}: inconsistent half-root multiplicity {}",
                self.name(),
                self.m_half
            )));
        }
        if !(self.b > 0.0) {
            return Err(Error::InvalidParameter("B must be positive".into()));
        }
        Ok(())
    }

    /// A = m_β + m_{β/2}/2, always an integer.
    pub fn a_param(&self) -> u32 {
        self.m_beta + self.m_half / 2
    }
}

impl fmt::Display for RootData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for RootData {
    type Err = Error;

    /// Parses `S<m>`, `CP<n>`, `HP<n>` or `OP2`.
    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownSelector(s.to_string());
        let upper = s.trim().to_ascii_uppercase();
        if upper == "OP2" {
            return make_space(Family::CayleyPlane, 2);
        }
        let (family, digits) = if let Some(rest) = upper.strip_prefix("CP") {
            (Family::ComplexProjective, rest)
        } else if let Some(rest) = upper.strip_prefix("HP") {
            (Family::QuaternionicProjective, rest)
        } else if let Some(rest) = upper.strip_prefix('S') {
            (Family::Sphere, rest)
        } else {
            return Err(unknown());
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(unknown());
        }
        let size: u32 = digits.parse().map_err(|_| unknown())?;
        make_space(family, size)
    }
}

/// The spaces covered by the `all` selector.
pub fn catalog() -> Vec<RootData> {
    ["S2", "S3", "S4", "S5", "S7", "CP2", "CP3", "HP2", "OP2"]
        .iter()
        .map(|s| s.parse().expect("catalog selectors are valid"))
        .collect()
}

/// Parses a comma-separated selector list; `all` expands to [`catalog`].
pub fn parse_selectors(list: &str) -> Result<Vec<RootData>> {
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if item.eq_ignore_ascii_case("all") {
            out.extend(catalog());
        } else {
            out.push(item.parse()?);
        }
    }
    if out.is_empty() {
        return Err(Error::EmptySpaceList);
    }
    Ok(out)
}

/// Per-isotype parameters, all exact.
#[derive(Debug, Clone, PartialEq)]
#[allow(non_snake_case)]
pub struct ChiParams {
    pub n: u32,
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub A: Rational,
    pub mu: Rational,
    pub kappa: Rational,
    pub nu: Rational,
    pub r: Rational,
}

impl ChiParams {
    pub fn mu_f64(&self) -> f64 {
        to_f64(&self.mu)
    }

    pub fn kappa_f64(&self) -> f64 {
        to_f64(&self.kappa)
    }

    pub fn nu_f64(&self) -> f64 {
        to_f64(&self.nu)
    }
}

pub(crate) fn to_f64(q: &Rational) -> f64 {
    q.to_f64().expect("rational parameters are small")
}

pub fn chi_params(space: &RootData, n: u32) -> ChiParams {
    let m_beta = i64::from(space.m_beta);
    let m_half = i64::from(space.m_half);
    let m = i64::from(space.m);
    let n_i = i64::from(n);
    let a_big = rat(2 * m_beta + m_half, 2);
    ChiParams {
        n,
        a: rat(m_half + 2 * m_beta + 2 * n_i, 2),
        b: rat(-n_i, 1),
        c: rat(m, 2),
        A: a_big,
        mu: rat(m - 1, 2),
        kappa: rat(m - 1, 2),
        nu: rat(m_beta, 2),
        r: rat(m, 1),
    }
}

/// η(ρH₀) = 2^m (sh x / x)^{m−1} ch(x)^{m_β} with x = ρB; the value at
/// ρ = 0 is the limit 2^m.
pub fn eta_radial(space: &RootData, rho: f64) -> f64 {
    let x = rho * space.b;
    let m = space.m as i32;
    2f64.powi(m) * shc(x).powi(m - 1) * x.cosh().powi(space.m_beta as i32)
}

/// sh(x)/x, with its Taylor series near the origin.
pub(crate) fn shc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 * (1.0 + x2 / 20.0)
    } else {
        x.sinh() / x
    }
}

/// Surface area of the unit sphere S^{m−1} ⊂ R^m.
pub fn sphere_volume(m: u32) -> f64 {
    assert!(m >= 1, "sphere_volume needs m >= 1");
    2.0 * std::f64::consts::PI.powf(f64::from(m) / 2.0) / gamma_half_integer(m)
}

/// Radial weight ρ^{m−1} √η(ρH₀) of the polar-coordinate integral.
pub fn radial_weight(space: &RootData, rho: f64) -> f64 {
    rho.powi(space.m as i32 - 1) * eta_radial(space, rho).sqrt()
}

/// Weight of the reduced integral after t = ρB:
/// (2^{m/2}/B^m) t^{(m−1)/2} sh(t)^{(m−1)/2} ch(t)^{m_β/2}.
pub fn reduced_weight(space: &RootData, t: f64) -> f64 {
    let m = f64::from(space.m);
    let half = (m - 1.0) / 2.0;
    2f64.powf(m / 2.0) / space.b.powf(m)
        * t.powf(half)
        * t.sinh().powf(half)
        * t.cosh().powf(f64::from(space.m_beta) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn multiplicity_table() {
        let s3 = make_space(Family::Sphere, 3).unwrap();
        assert_eq!((s3.m, s3.m_beta, s3.m_half), (3, 2, 0));
        let cp2 = make_space(Family::ComplexProjective, 2).unwrap();
        assert_eq!((cp2.m, cp2.m_beta, cp2.m_half), (4, 1, 2));
        let op2 = make_space(Family::CayleyPlane, 2).unwrap();
        assert_eq!((op2.m, op2.m_beta, op2.m_half), (16, 7, 8));
        for space in catalog() {
            space.validate().unwrap();
        }
    }

    #[test]
    fn low_rank_coincidences() {
        let cp1 = make_space(Family::ComplexProjective, 1).unwrap();
        let s2 = make_space(Family::Sphere, 2).unwrap();
        assert_eq!((cp1.m, cp1.m_beta, cp1.m_half), (s2.m, s2.m_beta, s2.m_half));
        let hp1 = make_space(Family::QuaternionicProjective, 1).unwrap();
        let s4 = make_space(Family::Sphere, 4).unwrap();
        assert_eq!((hp1.m, hp1.m_beta, hp1.m_half), (s4.m, s4.m_beta, s4.m_half));
    }

    #[test]
    fn rejects_small_sizes() {
        assert!(make_space(Family::Sphere, 1).is_err());
        assert!(make_space(Family::ComplexProjective, 0).is_err());
        assert!(make_space(Family::QuaternionicProjective, 0).is_err());
    }

    #[test]
    fn selectors() {
        assert_eq!("s3".parse::<RootData>().unwrap().m, 3);
        assert_eq!("HP2".parse::<RootData>().unwrap().m, 8);
        assert!("XP2".parse::<RootData>().is_err());
        assert!("S".parse::<RootData>().is_err());
        assert!("OP3".parse::<RootData>().is_err());
        assert_eq!(parse_selectors("all").unwrap().len(), 9);
        assert_eq!(parse_selectors("S3,CP2").unwrap().len(), 2);
        assert_eq!(parse_selectors(""), Err(Error::EmptySpaceList));
    }

    #[test]
    fn chi_params_examples() {
        let s3 = make_space(Family::Sphere, 3).unwrap();
        let p = chi_params(&s3, 1);
        assert_eq!(p.a, rat(3, 1));
        assert_eq!(p.b, rat(-1, 1));
        assert_eq!(p.c, rat(3, 2));
        assert_eq!(p.A, rat(2, 1));
        assert_eq!((p.mu.clone(), p.kappa.clone(), p.nu.clone()), (rat(1, 1), rat(1, 1), rat(1, 1)));
        assert_eq!(p.r, rat(3, 1));

        let p2 = chi_params(&s3, 2);
        assert_eq!((p2.a, p2.b, p2.c), (rat(4, 1), rat(-2, 1), rat(3, 2)));

        let cp2 = make_space(Family::ComplexProjective, 2).unwrap();
        let q = chi_params(&cp2, 1);
        assert_eq!((q.a, q.b, q.c, q.A), (rat(3, 1), rat(-1, 1), rat(2, 1), rat(2, 1)));
        assert_eq!((q.mu, q.kappa, q.nu), (rat(3, 2), rat(3, 2), rat(1, 2)));
    }

    #[test]
    fn chi_params_structural_identities() {
        for space in catalog() {
            for n in 0..=20 {
                let p = chi_params(&space, n);
                assert_eq!(p.a, &p.A + rat(i64::from(n), 1));
                assert_eq!(p.b, rat(-i64::from(n), 1));
                assert_eq!(p.c, (&p.mu + &p.kappa + rat(1, 1)) / rat(2, 1));
                assert_eq!(p.A, &p.nu + &p.kappa);
                assert_eq!(p.r, &p.mu + &p.kappa + rat(1, 1));
            }
        }
    }

    #[test]
    fn eta_examples() {
        let s3 = make_space(Family::Sphere, 3).unwrap();
        assert_eq!(eta_radial(&s3, 0.0), 8.0);
        let (sh, ch) = (1.0f64.sinh(), 1.0f64.cosh());
        assert_relative_eq!(eta_radial(&s3, 1.0), 8.0 * sh * sh * ch * ch, max_relative = 1e-14);
        assert_relative_eq!(eta_radial(&s3, 1.0), 26.3082, max_relative = 1e-5);
        let s2 = make_space(Family::Sphere, 2).unwrap();
        assert_relative_eq!(eta_radial(&s2, 1.0), 4.0 * sh * ch, max_relative = 1e-14);
        assert_relative_eq!(eta_radial(&s2, 1.0), 7.2537, max_relative = 1e-4);
    }

    #[test]
    fn eta_even_and_limit() {
        for space in catalog() {
            assert_eq!(eta_radial(&space, 0.0), 2f64.powi(space.m as i32));
            for rho in [1e-6, 1e-3, 0.3, 1.0, 2.5] {
                assert_eq!(eta_radial(&space, rho), eta_radial(&space, -rho));
            }
        }
    }

    #[test]
    fn sphere_volumes() {
        use std::f64::consts::PI;
        assert_relative_eq!(sphere_volume(2), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_volume(3), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_volume(4), 2.0 * PI * PI, max_relative = 1e-15);
    }

    #[test]
    fn polar_coordinates_of_a_gaussian() {
        // ∫_{R^m} e^{-|x|²} dx = π^{m/2} = Vol(S^{m-1}) · Γ(m/2)/2
        for m in 1..=16 {
            let lhs = std::f64::consts::PI.powf(f64::from(m) / 2.0);
            let rhs = sphere_volume(m) * gamma_half_integer(m) / 2.0;
            assert_relative_eq!(lhs, rhs, max_relative = 1e-14);
        }
    }

    #[test]
    fn radial_reduction_weights_agree() {
        for space in catalog() {
            for b in [1.0, 0.5, 2.0] {
                let space = space.clone().with_scale(b).unwrap();
                for k in 1..=10 {
                    let rho = 0.35 * f64::from(k);
                    let lhs = radial_weight(&space, rho);
                    let rhs = space.b * reduced_weight(&space, rho * space.b);
                    assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
                }
            }
        }
    }
}
