//! Finite-dimensional linear algebra over Q(z_n): vectors, matrices with exact
//! row reduction, coalgebras with cached Sweedler expansions, algebras given by
//! structure constants, multilinear functionals and convolution.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::report::Check;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinearError {
    #[error("not convolution invertible: {0}")]
    NotInvertible(String),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

#[derive(Clone, PartialEq, Eq, Default)]
pub struct Vector(pub Vec<Scalar>);

impl Vector {
    pub fn zeros(n: usize) -> Vector {
        Vector(vec![Scalar::zero(); n])
    }

    pub fn basis(n: usize, i: usize) -> Vector {
        let mut v = Vector::zeros(n);
        v.0[i] = Scalar::one();
        v
    }

    pub fn scalar(s: Scalar) -> Vector {
        Vector(vec![s])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.0.iter().enumerate().filter(|(_, s)| !s.is_zero())
    }

    pub fn add(&self, o: &Vector) -> Vector {
        Vector(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Vector) -> Vector {
        Vector(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Scalar) -> Vector {
        if c.is_one() {
            return self.clone();
        }
        Vector(self.0.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> Vector {
        Vector(self.0.iter().map(|a| -a).collect())
    }

    /// self += c * o
    pub fn axpy(&mut self, c: &Scalar, o: &Vector) {
        if c.is_zero() {
            return;
        }
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            if !b.is_zero() {
                *a = a.add_ref(&c.mul_ref(b));
            }
        }
    }

    /// self[i] += c
    pub fn add_at(&mut self, i: usize, c: &Scalar) {
        if !c.is_zero() {
            self.0[i] = self.0[i].add_ref(c);
        }
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_columns(rows: usize, cols: &[Vector]) -> Matrix {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.dim(), rows);
            for (i, s) in c.nonzeros() {
                m.set(i, j, s.clone());
            }
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[Vector]) -> Matrix {
        let mut m = Matrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, s) in r.nonzeros() {
                m.set(i, j, s.clone());
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: &Scalar) {
        if !v.is_zero() {
            let k = i * self.cols + j;
            self.data[k] = self.data[k].add_ref(v);
        }
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector((0..self.rows).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn row(&self, i: usize) -> Vector {
        Vector(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        assert_eq!(v.dim(), self.cols, "matrix/vector dimension mismatch");
        let mut out = Vector::zeros(self.rows);
        for (j, s) in v.nonzeros() {
            for i in 0..self.rows {
                let a = self.get(i, j);
                if !a.is_zero() {
                    out.0[i] = out.0[i].add_ref(&a.mul_ref(s));
                }
            }
        }
        out
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "matrix product dimension mismatch");
        let mut m = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        m.add_at(i, j, &a.mul_ref(b));
                    }
                }
            }
        }
        m
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for j in c..m.cols {
                let v = m.get(r, j).mul_ref(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let b = m.get(r, j);
                    if !b.is_zero() {
                        let v = m.get(i, j).sub_ref(&f.mul_ref(b));
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space, one vector per free column.
    pub fn kernel(&self) -> Vec<Vector> {
        let (m, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = Vector::zeros(self.cols);
                v.0[f] = Scalar::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v.0[p] = m.get(r, f).neg_ref();
                }
                v
            })
            .collect()
    }

    /// One solution of `self * x = b` (free variables set to zero).
    pub fn solve(&self, b: &Vector) -> Option<Vector> {
        assert_eq!(b.dim(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b.0[i].clone());
        }
        let (m, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = Vector::zeros(self.cols);
        for (r, &p) in pivots.iter().enumerate() {
            x.0[p] = m.get(r, self.cols).clone();
        }
        Some(x)
    }

    /// Particular solution plus kernel basis.
    pub fn solve_affine(&self, b: &Vector) -> Option<(Vector, Vec<Vector>)> {
        let x = self.solve(b)?;
        Some((x, self.kernel()))
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            cols.push(self.solve(&Vector::basis(n, j))?);
        }
        let inv = Matrix::from_columns(n, &cols);
        (self.mul(&inv) == Matrix::identity(n)).then_some(inv)
    }
}

/// Row-reduced basis of a subspace together with coordinate extraction.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub ambient: usize,
    /// Basis in reduced echelon form.
    pub basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn span(ambient: usize, gens: &[Vector]) -> Subspace {
        let m = Matrix::from_rows(ambient, gens);
        let (r, pivots) = m.rref();
        let basis = (0..pivots.len()).map(|i| r.row(i)).collect();
        Subspace { ambient, basis, pivots }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates in `basis` when `v` lies in the subspace.
    pub fn coords(&self, v: &Vector) -> Option<Vec<Scalar>> {
        let c: Vec<Scalar> = self.pivots.iter().map(|&p| v.0[p].clone()).collect();
        let mut back = Vector::zeros(self.ambient);
        for (ci, b) in c.iter().zip(&self.basis) {
            back.axpy(ci, b);
        }
        (back == *v).then_some(c)
    }

    pub fn contains(&self, v: &Vector) -> bool {
        self.coords(v).is_some()
    }

    /// Normal form of `v` modulo the subspace: zero on every pivot column.
    pub fn reduce(&self, v: &Vector) -> Vector {
        let mut w = v.clone();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            let c = w.0[p].clone();
            if !c.is_zero() {
                w.axpy(&c.neg_ref(), b);
            }
        }
        w
    }

    /// Columns that are not pivots; they index a basis of the quotient.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ambient).filter(|c| !self.pivots.contains(c)).collect()
    }

    pub fn from_coords(&self, c: &[Scalar]) -> Vector {
        let mut v = Vector::zeros(self.ambient);
        for (ci, b) in c.iter().zip(&self.basis) {
            v.axpy(ci, b);
        }
        v
    }
}

/// A vector space with named basis elements.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Space {
    pub labels: Vec<String>,
}

impl Space {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Space {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            assert!(seen.insert(l.clone()), "duplicate basis label {l}");
        }
        Space { labels }
    }

    pub fn indexed(prefix: &str, n: usize) -> Space {
        Space::new((0..n).map(|i| format!("{prefix}{i}")))
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Basis `a#b` of the tensor product, row-major.
    pub fn tensor(&self, other: &Space, sep: &str) -> Space {
        let mut labels = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.labels {
            for b in &other.labels {
                labels.push(format!("{a}{sep}{b}"));
            }
        }
        Space { labels }
    }

    pub fn render(&self, v: &Vector) -> String {
        render_with(&self.labels, v)
    }
}

pub fn render_with(labels: &[String], v: &Vector) -> String {
    let mut parts = Vec::new();
    for (i, s) in v.nonzeros() {
        let l = labels.get(i).map(String::as_str).unwrap_or("?");
        if s.is_one() {
            parts.push(l.to_string());
        } else if s.is_rational() {
            parts.push(format!("{s}*{l}"));
        } else {
            parts.push(format!("({s})*{l}"));
        }
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

/// Compare two vectors inside a check, rendering them with labels only on failure.
pub fn check_vec(c: &mut Check, witness: &[&str], space: &Space, lhs: &Vector, rhs: &Vector) -> bool {
    let ok = lhs == rhs;
    if ok {
        c.record(witness, true, "", "")
    } else {
        c.record(witness, false, space.render(lhs), space.render(rhs))
    }
}

/// A linear map between labelled spaces.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinMap {
    pub source: Space,
    pub target: Space,
    pub matrix: Matrix,
}

impl LinMap {
    pub fn new(source: Space, target: Space, matrix: Matrix) -> LinMap {
        assert_eq!(matrix.rows, target.dim());
        assert_eq!(matrix.cols, source.dim());
        LinMap { source, target, matrix }
    }

    pub fn identity(space: &Space) -> LinMap {
        LinMap::new(space.clone(), space.clone(), Matrix::identity(space.dim()))
    }

    pub fn from_images(source: &Space, target: &Space, images: &[Vector]) -> LinMap {
        LinMap::new(source.clone(), target.clone(), Matrix::from_columns(target.dim(), images))
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        self.matrix.apply(v)
    }

    pub fn image_of(&self, i: usize) -> Vector {
        self.matrix.column(i)
    }

    /// self ∘ other
    pub fn compose(&self, other: &LinMap) -> LinMap {
        LinMap::new(other.source.clone(), self.target.clone(), self.matrix.mul(&other.matrix))
    }
}

/// One term of an iterated comultiplication: leg indices and coefficient.
pub type Legs = Vec<(Vec<usize>, Scalar)>;

/// A coalgebra given by comultiplication and counit on a basis.
pub struct Coalgebra {
    pub space: Space,
    comult: Vec<Vec<(usize, usize, Scalar)>>,
    counit: Vec<Scalar>,
    cache: Mutex<HashMap<(usize, usize), Arc<Legs>>>,
}

impl Clone for Coalgebra {
    fn clone(&self) -> Self {
        Coalgebra::new(self.space.clone(), self.comult.clone(), self.counit.clone())
    }
}

impl PartialEq for Coalgebra {
    fn eq(&self, o: &Self) -> bool {
        self.space == o.space && self.comult_table() == o.comult_table() && self.counit == o.counit
    }
}

impl fmt::Debug for Coalgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Coalgebra").field("space", &self.space).field("counit", &self.counit).finish()
    }
}

impl Coalgebra {
    /// `comult[i]` lists `(j, k, c)` with Δ(e_i) = Σ c e_j⊗e_k.
    pub fn new(space: Space, comult: Vec<Vec<(usize, usize, Scalar)>>, counit: Vec<Scalar>) -> Coalgebra {
        assert_eq!(comult.len(), space.dim());
        assert_eq!(counit.len(), space.dim());
        let comult = comult
            .into_iter()
            .map(|terms| {
                let mut acc: Vec<(usize, usize, Scalar)> = Vec::new();
                for (j, k, c) in terms {
                    match acc.iter_mut().find(|t| t.0 == j && t.1 == k) {
                        Some(t) => t.2 = t.2.add_ref(&c),
                        None => acc.push((j, k, c)),
                    }
                }
                acc.retain(|t| !t.2.is_zero());
                acc.sort_by_key(|t| (t.0, t.1));
                acc
            })
            .collect();
        Coalgebra { space, comult, counit, cache: Mutex::new(HashMap::new()) }
    }

    /// The coalgebra with every basis element grouplike.
    pub fn grouplike(space: Space) -> Coalgebra {
        let n = space.dim();
        let comult = (0..n).map(|i| vec![(i, i, Scalar::one())]).collect();
        Coalgebra::new(space, comult, vec![Scalar::one(); n])
    }

    /// The one-dimensional coalgebra k.
    pub fn base_field() -> Coalgebra {
        Coalgebra::grouplike(Space::new(["1"]))
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn comult(&self, i: usize) -> &[(usize, usize, Scalar)] {
        &self.comult[i]
    }

    pub fn comult_table(&self) -> &[Vec<(usize, usize, Scalar)>] {
        &self.comult
    }

    pub fn counit(&self, i: usize) -> &Scalar {
        &self.counit[i]
    }

    pub fn counit_values(&self) -> &[Scalar] {
        &self.counit
    }

    pub fn counit_of(&self, v: &Vector) -> Scalar {
        let mut s = Scalar::zero();
        for (i, c) in v.nonzeros() {
            s = s.add_ref(&c.mul_ref(&self.counit[i]));
        }
        s
    }

    pub fn is_grouplike(&self, i: usize) -> bool {
        self.comult[i].len() == 1 && {
            let (j, k, c) = &self.comult[i][0];
            *j == i && *k == i && c.is_one()
        } && self.counit[i].is_one()
    }

    pub fn all_grouplike(&self) -> bool {
        (0..self.dim()).all(|i| self.is_grouplike(i))
    }

    /// Δ applied k-1 times to e_i, as a list of k-leg terms.
    pub fn sweedler(&self, i: usize, k: usize) -> Arc<Legs> {
        assert!(k >= 1, "sweedler needs at least one leg");
        if let Some(v) = self.cache.lock().unwrap().get(&(i, k)) {
            return v.clone();
        }
        let legs: Legs = if k == 1 {
            vec![(vec![i], Scalar::one())]
        } else {
            let prev = self.sweedler(i, k - 1);
            let mut out: Vec<(Vec<usize>, Scalar)> = Vec::new();
            for (idx, c) in prev.iter() {
                let last = *idx.last().unwrap();
                for (a, b, d) in &self.comult[last] {
                    let mut n = idx[..idx.len() - 1].to_vec();
                    n.push(*a);
                    n.push(*b);
                    out.push((n, c.mul_ref(d)));
                }
            }
            merge_legs(out)
        };
        let legs = Arc::new(legs);
        self.cache.lock().unwrap().insert((i, k), legs.clone());
        legs
    }

    /// Iterated comultiplication computed by always splitting the first leg.
    pub fn sweedler_left(&self, i: usize, k: usize) -> Legs {
        let mut cur: Legs = vec![(vec![i], Scalar::one())];
        for _ in 1..k {
            let mut out = Vec::new();
            for (idx, c) in &cur {
                for (a, b, d) in &self.comult[idx[0]] {
                    let mut n = vec![*a, *b];
                    n.extend_from_slice(&idx[1..]);
                    out.push((n, c.mul_ref(d)));
                }
            }
            cur = merge_legs(out);
        }
        cur
    }

    /// Iterated comultiplication of an arbitrary element.
    pub fn sweedler_vec(&self, v: &Vector, k: usize) -> Legs {
        let mut out = Vec::new();
        for (i, c) in v.nonzeros() {
            for (idx, d) in self.sweedler(i, k).iter() {
                out.push((idx.clone(), c.mul_ref(d)));
            }
        }
        merge_legs(out)
    }

    pub fn comult_vec(&self, v: &Vector) -> Vector {
        let n = self.dim();
        let mut out = Vector::zeros(n * n);
        for (i, c) in v.nonzeros() {
            for (a, b, d) in &self.comult[i] {
                out.add_at(a * n + b, &c.mul_ref(d));
            }
        }
        out
    }

    /// Tensor product coalgebra with basis index `i * other.dim() + j`.
    pub fn tensor(&self, other: &Coalgebra) -> Coalgebra {
        let db = other.dim();
        let mut comult = Vec::with_capacity(self.dim() * db);
        let mut counit = Vec::with_capacity(self.dim() * db);
        for i in 0..self.dim() {
            for j in 0..db {
                let mut terms = Vec::new();
                for (a1, a2, c) in &self.comult[i] {
                    for (b1, b2, d) in &other.comult[j] {
                        terms.push((a1 * db + b1, a2 * db + b2, c.mul_ref(d)));
                    }
                }
                comult.push(terms);
                counit.push(self.counit[i].mul_ref(&other.counit[j]));
            }
        }
        Coalgebra::new(self.space.tensor(&other.space, ","), comult, counit)
    }

    pub fn tensor_power(&self, k: usize) -> Coalgebra {
        let mut c = self.clone();
        for _ in 1..k {
            c = c.tensor(self);
        }
        c
    }

    /// Coassociativity on every basis element, compared as 3-leg tensors.
    pub fn check_coassociative(&self, c: &mut Check) {
        for i in 0..self.dim() {
            let a = legs_to_map(&self.sweedler(i, 3));
            let b = legs_to_map(&self.sweedler_left(i, 3));
            c.record(&[self.space.label(i)], a == b, format!("{a:?}"), format!("{b:?}"));
        }
    }

    pub fn check_counit(&self, c: &mut Check) {
        let n = self.dim();
        for i in 0..n {
            let mut left = Vector::zeros(n);
            let mut right = Vector::zeros(n);
            for (a, b, d) in &self.comult[i] {
                left.add_at(*b, &d.mul_ref(&self.counit[*a]));
                right.add_at(*a, &d.mul_ref(&self.counit[*b]));
            }
            let e = Vector::basis(n, i);
            check_vec(c, &[self.space.label(i), "left"], &self.space, &left, &e);
            check_vec(c, &[self.space.label(i), "right"], &self.space, &right, &e);
        }
    }
}

pub fn merge_legs(terms: Vec<(Vec<usize>, Scalar)>) -> Legs {
    let mut map: HashMap<Vec<usize>, Scalar> = HashMap::new();
    let mut order = Vec::new();
    for (idx, c) in terms {
        match map.get_mut(&idx) {
            Some(s) => *s = s.add_ref(&c),
            None => {
                order.push(idx.clone());
                map.insert(idx, c);
            }
        }
    }
    order
        .into_iter()
        .filter_map(|idx| {
            let c = map.remove(&idx).unwrap();
            (!c.is_zero()).then_some((idx, c))
        })
        .collect()
}

fn legs_to_map(l: &Legs) -> std::collections::BTreeMap<Vec<usize>, String> {
    l.iter().map(|(i, c)| (i.clone(), c.to_string())).collect()
}

/// A (not necessarily associative) algebra given by structure constants.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Algebra {
    pub space: Space,
    table: Vec<Vec<(usize, Scalar)>>,
    pub unit: Vector,
}

impl Algebra {
    /// `products[i * d + j]` is e_i e_j.
    pub fn new(space: Space, products: Vec<Vector>, unit: Vector) -> Algebra {
        let d = space.dim();
        assert_eq!(products.len(), d * d);
        assert_eq!(unit.dim(), d);
        let table = products.iter().map(|v| v.nonzeros().map(|(k, s)| (k, s.clone())).collect()).collect();
        Algebra { space, table, unit }
    }

    /// Build from a closure giving e_i e_j.
    pub fn from_fn(space: Space, unit: Vector, f: impl Fn(usize, usize) -> Vector) -> Algebra {
        let d = space.dim();
        let products = (0..d * d).map(|ij| f(ij / d, ij % d)).collect();
        Algebra::new(space, products, unit)
    }

    /// The base field as a one-dimensional algebra.
    pub fn scalars() -> Algebra {
        Algebra::new(Space::new(["1"]), vec![Vector::basis(1, 0)], Vector::basis(1, 0))
    }

    /// Group algebra with e_i e_j = e_{op(i,j)}.
    pub fn monomial(space: Space, unit: usize, op: impl Fn(usize, usize) -> (usize, Scalar)) -> Algebra {
        let d = space.dim();
        Algebra::from_fn(space, Vector::basis(d, unit), |i, j| {
            let (k, c) = op(i, j);
            let mut v = Vector::zeros(d);
            v.0[k] = c;
            v
        })
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn product_basis(&self, i: usize, j: usize) -> Vector {
        let mut v = Vector::zeros(self.dim());
        for (k, s) in &self.table[i * self.dim() + j] {
            v.0[*k] = s.clone();
        }
        v
    }

    pub fn product_terms(&self, i: usize, j: usize) -> &[(usize, Scalar)] {
        &self.table[i * self.dim() + j]
    }

    pub fn products(&self) -> Vec<Vector> {
        let d = self.dim();
        (0..d * d).map(|ij| self.product_basis(ij / d, ij % d)).collect()
    }

    pub fn mul(&self, a: &Vector, b: &Vector) -> Vector {
        let d = self.dim();
        let mut out = Vector::zeros(d);
        for (i, x) in a.nonzeros() {
            for (j, y) in b.nonzeros() {
                let xy = x.mul_ref(y);
                for (k, s) in &self.table[i * d + j] {
                    out.add_at(*k, &xy.mul_ref(s));
                }
            }
        }
        out
    }

    pub fn mul3(&self, a: &Vector, b: &Vector, c: &Vector) -> Vector {
        self.mul(&self.mul(a, b), c)
    }

    pub fn one(&self) -> Vector {
        self.unit.clone()
    }

    pub fn basis(&self, i: usize) -> Vector {
        Vector::basis(self.dim(), i)
    }

    pub fn zero(&self) -> Vector {
        Vector::zeros(self.dim())
    }

    pub fn scalar(&self, s: &Scalar) -> Vector {
        self.unit.scale(s)
    }

    /// Matrix of x ↦ a x.
    pub fn left_matrix(&self, a: &Vector) -> Matrix {
        let d = self.dim();
        Matrix::from_columns(d, &(0..d).map(|j| self.mul(a, &self.basis(j))).collect::<Vec<_>>())
    }

    /// Matrix of x ↦ x a.
    pub fn right_matrix(&self, a: &Vector) -> Matrix {
        let d = self.dim();
        Matrix::from_columns(d, &(0..d).map(|j| self.mul(&self.basis(j), a)).collect::<Vec<_>>())
    }

    /// Two-sided inverse, if any.
    pub fn inverse(&self, a: &Vector) -> Option<Vector> {
        let x = self.left_matrix(a).solve(&self.unit)?;
        (self.mul(&x, a) == self.unit).then_some(x)
    }

    pub fn is_unit(&self, a: &Vector) -> bool {
        self.inverse(a).is_some()
    }

    pub fn check_associative(&self, c: &mut Check) {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                let ij = self.product_basis(i, j);
                for k in 0..d {
                    let l = self.mul(&ij, &self.basis(k));
                    let r = self.mul(&self.basis(i), &self.product_basis(j, k));
                    let sp = &self.space;
                    check_vec(c, &[sp.label(i), sp.label(j), sp.label(k)], sp, &l, &r);
                }
            }
        }
    }

    pub fn check_unit(&self, c: &mut Check) {
        for i in 0..self.dim() {
            let e = self.basis(i);
            let sp = &self.space;
            check_vec(c, &[sp.label(i), "left"], sp, &self.mul(&self.unit, &e), &e);
            check_vec(c, &[sp.label(i), "right"], sp, &self.mul(&e, &self.unit), &e);
        }
    }

    pub fn is_associative(&self) -> bool {
        let mut c = Check { identity: String::new(), tested: 0, failures: Vec::new() };
        self.check_associative(&mut c);
        self.check_unit(&mut c);
        c.passed()
    }

    /// Transport along a change of basis: new basis vectors given in old coordinates.
    pub fn subalgebra(&self, space: Space, basis: &[Vector]) -> Option<Algebra> {
        let sub = Subspace::span(self.dim(), basis);
        if sub.dim() != basis.len() {
            return None;
        }
        let coords = |v: &Vector| -> Option<Vector> {
            let m = Matrix::from_columns(self.dim(), basis);
            let x = m.solve(v)?;
            (m.apply(&x) == *v).then_some(x)
        };
        let n = basis.len();
        let mut products = Vec::with_capacity(n * n);
        for a in basis {
            for b in basis {
                products.push(coords(&self.mul(a, b))?);
            }
        }
        let unit = coords(&self.unit)?;
        Some(Algebra::new(space, products, unit))
    }
}

/// Scalar-valued multilinear functional on V^{⊗arity}, indexed row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Functional {
    pub dim: usize,
    pub arity: usize,
    pub values: Vec<Scalar>,
}

pub fn flat_index(dim: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * dim + i)
}

pub fn unflatten(dim: usize, arity: usize, mut k: usize) -> Vec<usize> {
    let mut idx = vec![0; arity];
    for slot in idx.iter_mut().rev() {
        *slot = k % dim;
        k /= dim;
    }
    idx
}

impl Functional {
    pub fn zeros(dim: usize, arity: usize) -> Functional {
        Functional { dim, arity, values: vec![Scalar::zero(); dim.pow(arity as u32)] }
    }

    pub fn from_fn(dim: usize, arity: usize, f: impl Fn(&[usize]) -> Scalar) -> Functional {
        let values = (0..dim.pow(arity as u32)).map(|k| f(&unflatten(dim, arity, k))).collect();
        Functional { dim, arity, values }
    }

    /// ε⊗…⊗ε on the given coalgebra.
    pub fn counit_power(c: &Coalgebra, arity: usize) -> Functional {
        Functional::from_fn(c.dim(), arity, |idx| {
            idx.iter().fold(Scalar::one(), |acc, &i| acc.mul_ref(c.counit(i)))
        })
    }

    pub fn get(&self, idx: &[usize]) -> &Scalar {
        debug_assert_eq!(idx.len(), self.arity);
        &self.values[flat_index(self.dim, idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: Scalar) {
        let k = flat_index(self.dim, idx);
        self.values[k] = v;
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Multilinear evaluation on arbitrary vectors.
    pub fn eval(&self, args: &[&Vector]) -> Scalar {
        assert_eq!(args.len(), self.arity, "functional arity mismatch");
        let mut acc = Scalar::zero();
        let mut idx = vec![0; self.arity];
        self.eval_rec(args, 0, &mut idx, &Scalar::one(), &mut acc);
        acc
    }

    pub fn try_eval(&self, args: &[&Vector]) -> Result<Scalar, LinearError> {
        if args.len() != self.arity {
            return Err(LinearError::ArityMismatch { expected: self.arity, got: args.len() });
        }
        Ok(self.eval(args))
    }

    fn eval_rec(&self, args: &[&Vector], pos: usize, idx: &mut Vec<usize>, coef: &Scalar, acc: &mut Scalar) {
        if pos == args.len() {
            let v = self.get(idx);
            if !v.is_zero() {
                *acc = acc.add_ref(&coef.mul_ref(v));
            }
            return;
        }
        for (i, s) in args[pos].nonzeros() {
            idx[pos] = i;
            self.eval_rec(args, pos + 1, idx, &coef.mul_ref(s), acc);
        }
    }

    /// Evaluation on a list of Sweedler-type terms.
    pub fn eval_legs(&self, legs: &Legs) -> Scalar {
        let mut acc = Scalar::zero();
        for (idx, c) in legs {
            acc = acc.add_ref(&c.mul_ref(self.get(idx)));
        }
        acc
    }

    /// As a map from the tensor-power coalgebra into the one-dimensional algebra.
    pub fn to_map(&self) -> Vec<Vector> {
        self.values.iter().map(|s| Vector::scalar(s.clone())).collect()
    }

    pub fn from_map(dim: usize, arity: usize, m: &[Vector]) -> Functional {
        Functional { dim, arity, values: m.iter().map(|v| v.0[0].clone()).collect() }
    }

    pub fn is_counit_power(&self, c: &Coalgebra) -> bool {
        *self == Functional::counit_power(c, self.arity)
    }
}

/// Multilinear map V^{⊗arity} → R with values stored as vectors in R.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VMap {
    pub dim: usize,
    pub arity: usize,
    pub values: Vec<Vector>,
}

impl VMap {
    pub fn from_fn(dim: usize, arity: usize, f: impl Fn(&[usize]) -> Vector) -> VMap {
        let values = (0..dim.pow(arity as u32)).map(|k| f(&unflatten(dim, arity, k))).collect();
        VMap { dim, arity, values }
    }

    /// u_R ∘ (ε⊗…⊗ε).
    pub fn unit(c: &Coalgebra, arity: usize, r: &Algebra) -> VMap {
        VMap::from_fn(c.dim(), arity, |idx| {
            r.unit.scale(&idx.iter().fold(Scalar::one(), |acc, &i| acc.mul_ref(c.counit(i))))
        })
    }

    pub fn get(&self, idx: &[usize]) -> &Vector {
        &self.values[flat_index(self.dim, idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: Vector) {
        let k = flat_index(self.dim, idx);
        self.values[k] = v;
    }

    pub fn target_dim(&self) -> usize {
        self.values.first().map_or(0, Vector::dim)
    }

    pub fn eval(&self, args: &[&Vector]) -> Vector {
        assert_eq!(args.len(), self.arity);
        let mut acc = Vector::zeros(self.target_dim());
        let mut stack: Vec<(Vec<usize>, Scalar)> = vec![(Vec::new(), Scalar::one())];
        for a in args {
            let mut next = Vec::new();
            for (idx, c) in &stack {
                for (i, s) in a.nonzeros() {
                    let mut n = idx.clone();
                    n.push(i);
                    next.push((n, c.mul_ref(s)));
                }
            }
            stack = next;
        }
        for (idx, c) in stack {
            acc.axpy(&c, self.get(&idx));
        }
        acc
    }
}

/// (φψ)(c) = φ(c₁)ψ(c₂) for maps C → A given by their values on the basis of C.
pub fn convolution_product(phi: &[Vector], psi: &[Vector], c: &Coalgebra, a: &Algebra) -> Vec<Vector> {
    (0..c.dim())
        .map(|i| {
            let mut out = a.zero();
            for (j, k, s) in c.comult(i) {
                out.axpy(s, &a.mul(&phi[*j], &psi[*k]));
            }
            out
        })
        .collect()
}

/// u_A ∘ ε_C.
pub fn convolution_unit(c: &Coalgebra, a: &Algebra) -> Vec<Vector> {
    (0..c.dim()).map(|i| a.unit.scale(c.counit(i))).collect()
}

/// Two-sided convolution inverse, found by solving both one-sided linear systems.
pub fn convolution_inverse(phi: &[Vector], c: &Coalgebra, a: &Algebra) -> Result<Vec<Vector>, LinearError> {
    let dc = c.dim();
    let da = a.dim();
    let n = dc * da;
    let mut left = Matrix::zeros(n, n);
    let mut right = Matrix::zeros(n, n);
    for i in 0..dc {
        for (j, k, s) in c.comult(i) {
            for t in 0..da {
                let e = a.basis(t);
                let l = a.mul(&phi[*j], &e);
                let r = a.mul(&e, &phi[*k]);
                for (row_t, v) in l.nonzeros() {
                    left.add_at(i * da + row_t, k * da + t, &s.mul_ref(v));
                }
                for (row_t, v) in r.nonzeros() {
                    right.add_at(i * da + row_t, j * da + t, &s.mul_ref(v));
                }
            }
        }
    }
    let mut rhs = Vector::zeros(n);
    for i in 0..dc {
        for (t, v) in a.unit.nonzeros() {
            rhs.0[i * da + t] = v.mul_ref(c.counit(i));
        }
    }
    let x = left.solve(&rhs).ok_or_else(|| LinearError::NotInvertible("no right inverse".into()))?;
    let y = right.solve(&rhs).ok_or_else(|| LinearError::NotInvertible("no left inverse".into()))?;
    let split = |v: &Vector| -> Vec<Vector> { (0..dc).map(|i| Vector(v.0[i * da..(i + 1) * da].to_vec())).collect() };
    let (xr, yl) = (split(&x), split(&y));
    let unit = convolution_unit(c, a);
    // A right inverse and a left inverse agree when both exist in an associative algebra.
    if convolution_product(&yl, phi, c, a) == unit && convolution_product(phi, &yl, c, a) == unit {
        return Ok(yl);
    }
    if convolution_product(&xr, phi, c, a) == unit && convolution_product(phi, &xr, c, a) == unit {
        return Ok(xr);
    }
    Err(LinearError::NotInvertible("one-sided inverses differ".into()))
}

/// Convolution of scalar functionals of the same arity over a coalgebra.
pub fn convolve_functionals(f: &Functional, g: &Functional, c: &Coalgebra) -> Functional {
    let t = c.tensor_power(f.arity);
    let prod = convolution_product(&f.to_map(), &g.to_map(), &t, &Algebra::scalars());
    Functional::from_map(f.dim, f.arity, &prod)
}

pub fn invert_functional(f: &Functional, c: &Coalgebra) -> Result<Functional, LinearError> {
    let t = c.tensor_power(f.arity);
    let inv = convolution_inverse(&f.to_map(), &t, &Algebra::scalars())?;
    Ok(Functional::from_map(f.dim, f.arity, &inv))
}

/// Convolution inverse of an R-valued multilinear map.
pub fn invert_vmap(m: &VMap, c: &Coalgebra, r: &Algebra) -> Result<VMap, LinearError> {
    let t = c.tensor_power(m.arity);
    let inv = convolution_inverse(&m.values, &t, r)?;
    Ok(VMap { dim: m.dim, arity: m.arity, values: inv })
}

pub fn convolve_vmaps(f: &VMap, g: &VMap, c: &Coalgebra, r: &Algebra) -> VMap {
    let t = c.tensor_power(f.arity);
    VMap { dim: f.dim, arity: f.arity, values: convolution_product(&f.values, &g.values, &t, r) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> Coalgebra {
        Coalgebra::grouplike(Space::new(["1", "x"]))
    }

    fn c2_algebra() -> Algebra {
        Algebra::monomial(Space::new(["1", "x"]), 0, |i, j| ((i + j) % 2, Scalar::one()))
    }

    #[test]
    fn sweedler_grouplike() {
        let c = c2();
        assert_eq!(*c.sweedler(1, 3), vec![(vec![1, 1, 1], Scalar::one())]);
        assert_eq!(*c.sweedler(0, 1), vec![(vec![0], Scalar::one())]);
    }

    #[test]
    fn sweedler_association_independent_on_dual_group_algebra() {
        // dual of k[C2]: idempotent basis, Δ(p_g) = Σ_{ab=g} p_a⊗p_b
        let comult = vec![
            vec![(0, 0, Scalar::one()), (1, 1, Scalar::one())],
            vec![(0, 1, Scalar::one()), (1, 0, Scalar::one())],
        ];
        let c = Coalgebra::new(Space::new(["p1", "px"]), comult, vec![Scalar::one(), Scalar::zero()]);
        for i in 0..2 {
            for k in 1..6 {
                assert_eq!(legs_to_map(&c.sweedler(i, k)), legs_to_map(&c.sweedler_left(i, k)));
            }
        }
        let mut ch = Check { identity: "coassoc".into(), tested: 0, failures: vec![] };
        c.check_coassociative(&mut ch);
        c.check_counit(&mut ch);
        assert!(ch.passed());
    }

    #[test]
    fn rref_kernel_solve() {
        let m = Matrix::from_rows(
            3,
            &[
                Vector(vec![1.into(), 2.into(), 3.into()]),
                Vector(vec![2.into(), 4.into(), 6.into()]),
                Vector(vec![0.into(), 1.into(), 1.into()]),
            ],
        );
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).is_zero());
        let b = Vector(vec![1.into(), 2.into(), 1.into()]);
        let x = m.solve(&b).unwrap();
        assert_eq!(m.apply(&x), b);
        assert!(m.solve(&Vector(vec![1.into(), 0.into(), 0.into()])).is_none());
    }

    #[test]
    fn convolution_on_grouplikes_is_pointwise() {
        let c = c2();
        let a = Algebra::scalars();
        let f = vec![Vector::scalar(2.into()), Vector::scalar(3.into())];
        let g = vec![Vector::scalar(5.into()), Vector::scalar(7.into())];
        let p = convolution_product(&f, &g, &c, &a);
        assert_eq!(p, vec![Vector::scalar(10.into()), Vector::scalar(21.into())]);
        let inv = convolution_inverse(&f, &c, &a).unwrap();
        assert_eq!(inv[1], Vector::scalar(Scalar::from_frac(1, 3)));
    }

    #[test]
    fn zero_map_not_invertible() {
        let c = c2();
        let a = c2_algebra();
        let z = vec![a.zero(), a.zero()];
        assert!(matches!(convolution_inverse(&z, &c, &a), Err(LinearError::NotInvertible(_))));
    }

    #[test]
    fn unit_is_neutral_and_self_inverse() {
        let c = c2();
        let a = c2_algebra();
        let u = convolution_unit(&c, &a);
        let psi = vec![a.basis(1), a.unit.scale(&Scalar::from_i64(3))];
        assert_eq!(convolution_product(&u, &psi, &c, &a), psi);
        assert_eq!(convolution_inverse(&u, &c, &a).unwrap(), u);
    }

    #[test]
    fn functional_arity_checked() {
        let f = Functional::zeros(2, 3);
        let v = Vector::basis(2, 0);
        assert_eq!(f.try_eval(&[&v]), Err(LinearError::ArityMismatch { expected: 3, got: 1 }));
    }

    #[test]
    fn subspace_coordinates() {
        let s = Subspace::span(3, &[Vector(vec![1.into(), 1.into(), 0.into()]), Vector(vec![0.into(), 1.into(), 1.into()])]);
        assert_eq!(s.dim(), 2);
        let v = Vector(vec![1.into(), 2.into(), 1.into()]);
        let c = s.coords(&v).unwrap();
        assert_eq!(s.from_coords(&c), v);
        assert!(!s.contains(&Vector::basis(3, 0)));
    }
}
