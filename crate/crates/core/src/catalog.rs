//! Built-in low-dimensional structures: group algebras, H(2), H(3), twisted
//! group algebras of C2^n, and the cleft data classifying crossed products
//! over H(2) and H(3).

use thiserror::Error;

use crate::coquasi::{CoquasiBialgebra, CoquasiHopf, Twist};
use crate::linear::{Algebra, Coalgebra, Functional, Matrix, Space, Vector};
use crate::scalar::{FieldSpec, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown builtin {0:?}")]
    UnknownName(String),
    #[error("builtin {name} needs a field containing a primitive {needed}-th root of unity (cyclotomic order {got})")]
    Field { name: String, needed: u32, got: u32 },
    #[error("invalid datum: {0}")]
    InvalidDatum(String),
}

/// Labels 1, x, x^2, … for the cyclic group of order n.
pub fn cyclic_labels(n: usize) -> Vec<String> {
    (0..n)
        .map(|k| match k {
            0 => "1".to_string(),
            1 => "x".to_string(),
            k => format!("x^{k}"),
        })
        .collect()
}

/// k[C_n] with grouplike coalgebra, trivial ω, S(g) = g⁻¹ and α = β = ε.
pub fn group_algebra(n: usize) -> CoquasiHopf {
    let space = Space::new(cyclic_labels(n));
    let coalgebra = Coalgebra::grouplike(space.clone());
    let algebra = Algebra::monomial(space, 0, |i, j| ((i + j) % n, Scalar::one()));
    let omega = Functional::counit_power(&coalgebra, 3);
    let base = CoquasiBialgebra::with_inverse(coalgebra.clone(), algebra, omega.clone(), omega);
    let mut s = Matrix::zeros(n, n);
    for i in 0..n {
        s.set((n - i) % n, i, Scalar::one());
    }
    let eps = Functional::counit_power(&coalgebra, 1);
    let mut h = CoquasiHopf::new(base, s, eps.clone(), eps);
    h.twist_f = Some(Twist::trivial(&coalgebra));
    h
}

/// H(2): k[C2] with ω(x,x,x) = −1, S = id, α(x) = −1, β = ε.
pub fn h2() -> CoquasiHopf {
    let g = group_algebra(2);
    let coalgebra = g.base.coalgebra.clone();
    let omega = Functional::from_fn(2, 3, |ix| if ix == [1, 1, 1] { Scalar::from_i64(-1) } else { Scalar::one() });
    let base = CoquasiBialgebra::with_inverse(coalgebra.clone(), g.base.algebra.clone(), omega.clone(), omega);
    let alpha = Functional { dim: 2, arity: 1, values: vec![Scalar::one(), Scalar::from_i64(-1)] };
    let beta = Functional::counit_power(&coalgebra, 1);
    CoquasiHopf::new(base, Matrix::identity(2), alpha, beta)
        .with_twist_f()
        .expect("H(2) has a twist f")
}

/// H(3) over Q(z_n), 3 | n; q = z_n^(n/3).
pub fn h3(spec: FieldSpec) -> Result<CoquasiHopf, CatalogError> {
    let n = spec.cyclotomic_order;
    if n % 3 != 0 {
        return Err(CatalogError::Field { name: "H3".into(), needed: 3, got: n });
    }
    let q = Scalar::root_of_unity(n, (n / 3) as i64);
    let qi = q.inv().unwrap();
    let g = group_algebra(3);
    let coalgebra = g.base.coalgebra.clone();
    let omega = Functional::from_fn(3, 3, |ix| match ix {
        [1, 2, 1] | [2, 1, 1] | [2, 2, 1] => qi.clone(),
        [1, 2, 2] | [2, 1, 2] | [2, 2, 2] => q.clone(),
        _ => Scalar::one(),
    });
    let omega_inv = Functional { dim: 3, arity: 3, values: omega.values.iter().map(|v| v.inv().unwrap()).collect() };
    let base = CoquasiBialgebra::with_inverse(coalgebra.clone(), g.base.algebra.clone(), omega, omega_inv);
    let alpha = Functional::counit_power(&coalgebra, 1);
    let beta = Functional { dim: 3, arity: 1, values: vec![Scalar::one(), q.clone(), qi] };
    Ok(CoquasiHopf::new(base, g.antipode.clone(), alpha, beta)
        .with_twist_f()
        .expect("H(3) has a twist f"))
}

/// The primitive cube root of unity used by [`h3`] in the given field.
pub fn h3_q(spec: FieldSpec) -> Scalar {
    let n = spec.cyclotomic_order;
    Scalar::root_of_unity(n, (n / 3) as i64)
}

/// Labels of C2^n: products of generators e1…en, "1" for the identity.
pub fn c2n_labels(n: usize) -> Vec<String> {
    (0..1usize << n)
        .map(|m| {
            if m == 0 {
                "1".to_string()
            } else {
                (0..n).filter(|i| m >> i & 1 == 1).map(|i| format!("e{}", i + 1)).collect::<String>()
            }
        })
        .collect()
}

/// k[C2^n] as a Hopf algebra.
pub fn group_c2n(n: usize) -> CoquasiHopf {
    let d = 1usize << n;
    let space = Space::new(c2n_labels(n));
    let coalgebra = Coalgebra::grouplike(space.clone());
    let algebra = Algebra::monomial(space, 0, |i, j| (i ^ j, Scalar::one()));
    let omega = Functional::counit_power(&coalgebra, 3);
    let base = CoquasiBialgebra::with_inverse(coalgebra.clone(), algebra, omega.clone(), omega);
    let eps = Functional::counit_power(&coalgebra, 1);
    let mut h = CoquasiHopf::new(base, Matrix::identity(d), eps.clone(), eps);
    h.twist_f = Some(Twist::trivial(&coalgebra));
    h
}

/// The Clifford bicharacter τ(a,b) = (−1)^{Σ_{i≤j} a_i b_j} on C2^n.
pub fn clifford_twist(n: usize) -> Twist {
    let h = group_c2n(n);
    Twist::grouplike(&h.base.coalgebra, |a, b| {
        let mut e = 0;
        for i in 0..n {
            for j in i..n {
                e += (a >> i & 1) * (b >> j & 1);
            }
        }
        if e % 2 == 0 {
            Scalar::one()
        } else {
            Scalar::from_i64(-1)
        }
    })
    .expect("bicharacter is invertible")
}

/// Names accepted by [`builtin_hopf`].
pub const BUILTIN_NAMES: &[&str] = &["H2", "H3", "C<n>", "C2^<n>"];

/// Resolve a builtin coquasi-Hopf algebra by name.
pub fn builtin_hopf(name: &str, spec: FieldSpec) -> Result<CoquasiHopf, CatalogError> {
    match name {
        "H2" => Ok(h2()),
        "H3" => h3(spec),
        _ => {
            if let Some(k) = name.strip_prefix("C2^") {
                let n: usize = k.parse().map_err(|_| CatalogError::UnknownName(name.into()))?;
                if (1..=6).contains(&n) {
                    return Ok(group_c2n(n));
                }
            } else if let Some(k) = name.strip_prefix('C') {
                let n: usize = k.parse().map_err(|_| CatalogError::UnknownName(name.into()))?;
                if (1..=64).contains(&n) {
                    return Ok(group_algebra(n));
                }
            }
            Err(CatalogError::UnknownName(name.into()))
        }
    }
}

pub fn basis_vector(h: &CoquasiHopf, label: &str) -> Vector {
    let i = h.base.space().index_of(label).unwrap_or_else(|| panic!("no basis element {label}"));
    h.base.e(i)
}

mod data;

pub use data::{
    check_h2_datum, check_h3_datum, cyclic_algebra, data_equivalent_h2, data_equivalent_h3, gaussian_algebra,
    h2_fixture_datum, h2_relations, h2_system, h2_table, h3_fixture_datum, h3_relations, h3_system, h3_table,
    inner_automorphism, inner_automorphisms, quaternion_algebra, scaling_endomorphism, search_h2_data, CrossedTable,
    DataEquivalence, DatumCheck, DatumSearch, H2Datum, H3Datum,
};

/// k[C2^n] twisted by the Clifford bicharacter, a comodule algebra over the
/// twisted group algebra H_τ. For n = 2 this is the quaternion algebra.
pub fn twisted_group_algebra(n: usize) -> crate::comodule::ComoduleAlgebra {
    let host = std::sync::Arc::new(group_c2n(n));
    let a = crate::comodule::ComoduleAlgebra::regular(host);
    crate::comodule::twist_comodule_algebra(&a, &clifford_twist(n))
}
