//! Arithmetic in GF(p^k).
//!
//! Elements are stored as a single `u32` code, the integer whose base-p digits
//! (little-endian) are the polynomial coefficients reduced modulo the field's
//! modulus. [`Field`] carries log/exp tables so that multiplication and
//! inversion are table lookups; the slow polynomial route is kept around for
//! table construction and for cross-checking.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

/// Largest field order accepted by [`Field::new`].
pub const DEFAULT_ORDER_CAP: u64 = 1 << 20;

/// Fields up to this order get a full addition table.
const ADD_TABLE_MAX_Q: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{k} exceeds cap {cap}")]
    OrderCapExceeded { p: u64, k: u32, cap: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields ({0} vs {1})")]
    FieldMismatch(String, String),
    #[error("invalid field literal {0:?}: {1}")]
    Parse(String, String),
}

/// Characteristic, degree and the defining modulus of a finite field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u32,
    k: u32,
    /// Coefficients `c_0..=c_k` of the monic modulus, `c_k = 1`.
    modulus: Vec<u32>,
}

impl FieldSpec {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.p.pow(self.k)
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.k)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Polynomials over GF(p) as coefficient vectors, lowest degree first.
pub(crate) mod poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn degree(a: &[u32]) -> Option<usize> {
        a.iter().rposition(|&c| c != 0)
    }

    fn inv_mod(a: u32, p: u32) -> u32 {
        // p is prime, so a^(p-2) is the inverse.
        let mut result = 1u64;
        let mut base = a as u64 % p as u64;
        let mut e = p as u64 - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % p as u64;
            }
            base = base * base % p as u64;
            e >>= 1;
        }
        result as u32
    }

    /// Remainder of `a` modulo `m` (m nonzero).
    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = degree(m).expect("modulus must be nonzero");
        let lead_inv = inv_mod(m[dm], p) as u64;
        while let Some(dr) = degree(&r) {
            if dr < dm {
                break;
            }
            let factor = r[dr] as u64 * lead_inv % p as u64;
            let shift = dr - dm;
            for (i, &c) in m.iter().enumerate().take(dm + 1) {
                let sub = factor * c as u64 % p as u64;
                let cur = r[i + shift] as u64;
                r[i + shift] = ((cur + p as u64 - sub) % p as u64) as u32;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let mut out: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
        trim(&mut out);
        out
    }

    pub fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        rem(&mul(a, b, p), m, p)
    }

    /// Monic polynomial of degree `d` whose lower coefficients are the base-p
    /// digits of `index`.
    pub fn monic_from_index(d: usize, mut index: u64, p: u32) -> Vec<u32> {
        let mut c = vec![0u32; d + 1];
        for slot in c.iter_mut().take(d) {
            *slot = (index % p as u64) as u32;
            index /= p as u64;
        }
        c[d] = 1;
        c
    }

    /// Irreducibility by trial division with every monic polynomial of degree
    /// up to half the degree of `f`.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let n = match degree(f) {
            Some(n) => n,
            None => return false,
        };
        for d in 1..=n / 2 {
            let count = (p as u64).pow(d as u32);
            for idx in 0..count {
                let g = monic_from_index(d, idx, p);
                if rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

/// Lexicographically smallest monic irreducible polynomial of degree `k`,
/// ordering candidates by the base-p value of their lower coefficients.
fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    let count = (p as u64).pow(k);
    (0..count)
        .map(|idx| poly::monic_from_index(k as usize, idx, p))
        .find(|f| k == 1 || poly::is_irreducible(f, p))
        .expect("an irreducible polynomial of every degree exists")
}

struct FieldInner {
    spec: FieldSpec,
    q: u32,
    primitive: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    add_table: Option<Vec<u32>>,
    /// Digit-reversed codes; see [`Field::lex_rank`].
    lex: Option<(Vec<u32>, Vec<u32>)>,
}

/// A finite field together with its lookup tables. Cheap to clone.
#[derive(Clone)]
pub struct Field {
    inner: Arc<FieldInner>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({:?})", self.inner.spec)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.spec == other.inner.spec
    }
}

impl Eq for Field {}

impl std::hash::Hash for Field {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.inner.spec.hash(state);
    }
}

impl Field {
    /// Builds GF(p^k) with the default order cap.
    pub fn new(p: u64, k: u32) -> Result<Self, GfError> {
        Self::with_cap(p, k, DEFAULT_ORDER_CAP)
    }

    pub fn with_cap(p: u64, k: u32, cap: u64) -> Result<Self, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if k < 1 {
            return Err(GfError::ZeroDegree);
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= cap && q <= u32::MAX as u64)
            .ok_or(GfError::OrderCapExceeded { p, k, cap })?;
        let p = p as u32;
        let q = q as u32;
        let spec = FieldSpec {
            p,
            k,
            modulus: smallest_irreducible(p, k),
        };

        let primitive = find_primitive(&spec);
        let mut exp = vec![0u32; (q - 1) as usize];
        let mut log = vec![0u32; q as usize];
        let g = digits(primitive, p, k);
        let mut cur = vec![1u32];
        for (i, slot) in exp.iter_mut().enumerate() {
            let code = code_of(&cur, p);
            *slot = code;
            log[code as usize] = i as u32;
            cur = poly::mul_mod(&cur, &g, &spec.modulus, p);
        }

        let add_table = if k > 1 && p != 2 && q <= ADD_TABLE_MAX_Q {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = add_digits(a, b, p);
                }
            }
            Some(t)
        } else {
            None
        };

        let lex = (k > 1).then(|| {
            let fwd: Vec<u32> = (0..q).map(|c| reverse_digits(c, p, k)).collect();
            let mut back = vec![0u32; q as usize];
            for (c, &r) in fwd.iter().enumerate() {
                back[r as usize] = c as u32;
            }
            (fwd, back)
        });

        Ok(Field {
            inner: Arc::new(FieldInner {
                spec,
                q,
                primitive,
                exp,
                log,
                add_table,
                lex,
            }),
        })
    }

    /// Builds the field with `q` elements, `q` a prime power.
    pub fn from_order(q: u64) -> Result<Self, GfError> {
        let p = prime_factors(q).first().copied().ok_or(GfError::NotPrimePower(q))?;
        let mut k = 0u32;
        let mut rest = q;
        while rest.is_multiple_of(p) {
            rest /= p;
            k += 1;
        }
        if rest != 1 {
            return Err(GfError::NotPrimePower(q));
        }
        Self::new(p, k)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.inner.spec
    }

    pub fn p(&self) -> u32 {
        self.inner.spec.p
    }

    pub fn k(&self) -> u32 {
        self.inner.spec.k
    }

    pub fn q(&self) -> u32 {
        self.inner.q
    }

    /// Code of the smallest generator of the multiplicative group.
    pub fn primitive_code(&self) -> u32 {
        self.inner.primitive
    }

    pub fn primitive_element(&self) -> FieldElem {
        self.elem(self.inner.primitive)
    }

    /// Wraps a raw code; panics if it is not below q.
    pub fn elem(&self, code: u32) -> FieldElem {
        assert!(code < self.q(), "code {code} out of range for {}", self.spec());
        FieldElem {
            field: self.clone(),
            code,
        }
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElem, GfError> {
        let p = self.p();
        if coeffs.len() > self.k() as usize || coeffs.iter().any(|&c| c >= p) {
            return Err(GfError::Parse(
                format!("{coeffs:?}"),
                format!("expected at most {} coefficients below {p}", self.k()),
            ));
        }
        Ok(self.elem(code_of(coeffs, p)))
    }

    /// Image of an integer under the prime-field embedding.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p() as i64) as u32
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.q()).map(move |c| self.elem(c))
    }

    // Raw code arithmetic. Callers are responsible for passing codes < q.

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let inner = &*self.inner;
        if inner.spec.k == 1 {
            let s = a + b;
            if s >= inner.spec.p {
                s - inner.spec.p
            } else {
                s
            }
        } else if inner.spec.p == 2 {
            a ^ b
        } else if let Some(t) = &inner.add_table {
            t[(a * inner.q + b) as usize]
        } else {
            add_digits(a, b, inner.spec.p)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        let inner = &*self.inner;
        if a == 0 || inner.spec.p == 2 {
            a
        } else if inner.spec.k == 1 {
            inner.spec.p - a
        } else {
            let p = inner.spec.p;
            map_digits(a, p, |d| (p - d) % p)
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let inner = &*self.inner;
        let n = inner.q - 1;
        let s = inner.log[a as usize] + inner.log[b as usize];
        inner.exp[(if s >= n { s - n } else { s }) as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let inner = &*self.inner;
        let n = inner.q - 1;
        let l = inner.log[a as usize];
        Some(inner.exp[((n - l) % n) as usize])
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.q() - 1) as u64;
        let l = self.inner.log[a as usize] as u64;
        self.inner.exp[((l * (e % n)) % n) as usize]
    }

    /// Multiplicative order of a nonzero code.
    pub fn order(&self, a: u32) -> Option<u64> {
        if a == 0 {
            return None;
        }
        let n = (self.q() - 1) as u64;
        let l = self.inner.log[a as usize] as u64;
        Some(n / num_integer::gcd(n, l))
    }

    /// Product computed by polynomial multiplication and reduction, bypassing
    /// the tables.
    pub fn mul_by_poly(&self, a: u32, b: u32) -> u32 {
        let (p, k) = (self.p(), self.k());
        let prod = poly::mul_mod(
            &digits(a, p, k),
            &digits(b, p, k),
            &self.inner.spec.modulus,
            p,
        );
        code_of(&prod, p)
    }

    /// Order-preserving rank of a code with respect to the lexicographic
    /// order of its little-endian digit string.
    #[inline]
    pub fn lex_rank(&self, code: u32) -> u32 {
        match &self.inner.lex {
            Some((fwd, _)) => fwd[code as usize],
            None => code,
        }
    }

    #[inline]
    pub fn from_lex_rank(&self, rank: u32) -> u32 {
        match &self.inner.lex {
            Some((_, back)) => back[rank as usize],
            None => rank,
        }
    }

    /// Bytes per digit in the canonical serialization.
    pub fn digit_width(&self) -> usize {
        let bits = 32 - (self.p() - 1).leading_zeros() as usize;
        bits.div_ceil(8).max(1)
    }

    /// Canonical serialization of a code: its base-p digits, little-endian,
    /// each digit in `digit_width` little-endian bytes.
    pub fn write_canonical(&self, code: u32, out: &mut Vec<u8>) {
        let w = self.digit_width();
        for d in digits(code, self.p(), self.k()) {
            out.extend_from_slice(&d.to_le_bytes()[..w]);
        }
    }
}

fn digits(mut code: u32, p: u32, k: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(k as usize);
    for _ in 0..k {
        out.push(code % p);
        code /= p;
    }
    out
}

fn code_of(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

fn reverse_digits(code: u32, p: u32, k: u32) -> u32 {
    let d = digits(code, p, k);
    d.iter().fold(0u32, |acc, &c| acc * p + c)
}

fn map_digits(mut a: u32, p: u32, f: impl Fn(u32) -> u32) -> u32 {
    let mut out = 0u32;
    let mut scale = 1u32;
    while a > 0 {
        out += f(a % p) * scale;
        a /= p;
        scale *= p;
    }
    out
}

fn add_digits(mut a: u32, mut b: u32, p: u32) -> u32 {
    let mut out = 0u32;
    let mut scale = 1u32;
    while a > 0 || b > 0 {
        out += ((a % p + b % p) % p) * scale;
        a /= p;
        b /= p;
        scale *= p;
    }
    out
}

fn find_primitive(spec: &FieldSpec) -> u32 {
    let (p, k) = (spec.p, spec.k);
    let q = spec.q() as u64;
    let n = q - 1;
    let factors = prime_factors(n);
    let pow = |code: u32, mut e: u64| {
        let mut result = vec![1u32];
        let mut base = digits(code, p, k);
        while e > 0 {
            if e & 1 == 1 {
                result = poly::mul_mod(&result, &base, &spec.modulus, p);
            }
            base = poly::mul_mod(&base, &base, &spec.modulus, p);
            e >>= 1;
        }
        code_of(&result, p)
    };
    (1..q as u32)
        .find(|&c| factors.iter().all(|&r| pow(c, n / r) != 1))
        .expect("the multiplicative group of a finite field is cyclic")
}

/// A field element bound to its field. Arithmetic between elements of
/// different fields is an error.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElem {
    field: Field,
    code: u32,
}

impl FieldElem {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn code(&self) -> u32 {
        self.code
    }

    pub fn coeffs(&self) -> Vec<u32> {
        digits(self.code, self.field.p(), self.field.k())
    }

    pub fn is_zero(&self) -> bool {
        self.code == 0
    }

    fn check(&self, other: &FieldElem) -> Result<(), GfError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(GfError::FieldMismatch(
                self.field.spec().to_string(),
                other.field.spec().to_string(),
            ))
        }
    }

    pub fn add(&self, other: &FieldElem) -> Result<FieldElem, GfError> {
        self.check(other)?;
        Ok(self.field.elem(self.field.add(self.code, other.code)))
    }

    pub fn sub(&self, other: &FieldElem) -> Result<FieldElem, GfError> {
        self.check(other)?;
        Ok(self.field.elem(self.field.sub(self.code, other.code)))
    }

    pub fn mul(&self, other: &FieldElem) -> Result<FieldElem, GfError> {
        self.check(other)?;
        Ok(self.field.elem(self.field.mul(self.code, other.code)))
    }

    pub fn neg(&self) -> FieldElem {
        self.field.elem(self.field.neg(self.code))
    }

    pub fn inv(&self) -> Result<FieldElem, GfError> {
        self.field
            .inv(self.code)
            .map(|c| self.field.elem(c))
            .ok_or(GfError::DivisionByZero)
    }

    pub fn pow(&self, e: u64) -> FieldElem {
        self.field.elem(self.field.pow(self.code, e))
    }

    pub fn frobenius(&self) -> FieldElem {
        self.pow(self.field.p() as u64)
    }

    pub fn order(&self) -> Option<u64> {
        self.field.order(self.code)
    }

    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.field.write_canonical(self.code, &mut out);
        out
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `GF(p^k):c0,c1,...` with exactly k coefficients.
impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs: Vec<String> = self.coeffs().iter().map(u32::to_string).collect();
        write!(f, "{}:{}", self.field.spec(), coeffs.join(","))
    }
}

impl FromStr for FieldElem {
    type Err = GfError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |why: &str| GfError::Parse(s.to_string(), why.to_string());
        let rest = s.trim().strip_prefix("GF(").ok_or_else(|| bad("missing GF( prefix"))?;
        let (order, coeffs) = rest.split_once("):").ok_or_else(|| bad("missing '):'"))?;
        let (p, k) = order.split_once('^').ok_or_else(|| bad("order must be p^k"))?;
        let p: u64 = p.trim().parse().map_err(|_| bad("bad characteristic"))?;
        let k: u32 = k.trim().parse().map_err(|_| bad("bad degree"))?;
        let coeffs: Vec<u32> = coeffs
            .split(',')
            .map(|c| c.trim().parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad("bad coefficient"))?;
        if coeffs.len() != k as usize {
            return Err(bad("coefficient count must equal the degree"));
        }
        let field = Field::new(p, k)?;
        field.from_coeffs(&coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn prime_fields_use_linear_modulus() {
        let f = Field::new(2, 1).unwrap();
        assert_eq!(f.spec().modulus(), &[0, 1]);
        assert_eq!(Field::new(3, 1).unwrap().q(), 3);
    }

    #[test]
    fn gf4_modulus_is_the_unique_irreducible_quadratic() {
        // Brute force over all four monic quadratics x^2 + b x + c over GF(2):
        // irreducible iff neither 0 nor 1 is a root.
        let irreducible: Vec<[u32; 3]> = (0..4)
            .map(|i| [i & 1, i >> 1, 1])
            .filter(|f| (0..2).all(|x| (f[0] + f[1] * x + f[2] * x * x) % 2 != 0))
            .collect();
        assert_eq!(irreducible, vec![[1, 1, 1]]);
        assert_eq!(Field::new(2, 2).unwrap().spec().modulus(), &[1, 1, 1]);
    }

    #[test]
    fn modulus_choice_for_small_extensions() {
        assert_eq!(Field::new(2, 3).unwrap().spec().modulus(), &[1, 1, 0, 1]);
        assert_eq!(Field::new(3, 2).unwrap().spec().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn from_order_splits_prime_powers() {
        let f = Field::from_order(9).unwrap();
        assert_eq!((f.p(), f.k()), (3, 2));
        assert_eq!(Field::from_order(7).unwrap().k(), 1);
        assert_eq!(Field::from_order(6).unwrap_err(), GfError::NotPrimePower(6));
        assert_eq!(Field::from_order(1).unwrap_err(), GfError::NotPrimePower(1));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Field::new(4, 1).unwrap_err(), GfError::NotPrime(4));
        assert_eq!(Field::new(1, 1).unwrap_err(), GfError::NotPrime(1));
        assert_eq!(Field::new(2, 0).unwrap_err(), GfError::ZeroDegree);
        assert!(matches!(
            Field::new(2, 21),
            Err(GfError::OrderCapExceeded { .. })
        ));
        assert!(Field::new(2, 20).is_ok());
    }

    #[test]
    fn primitive_elements() {
        assert_eq!(Field::new(2, 1).unwrap().primitive_code(), 1);
        assert_eq!(Field::new(7, 1).unwrap().primitive_code(), 3);
        let gf4 = Field::new(2, 2).unwrap();
        assert_eq!(gf4.primitive_element().coeffs(), vec![0, 1]);
    }

    #[test]
    fn gf7_three_is_primitive_by_powering() {
        let mut seen = std::collections::BTreeSet::new();
        let mut x = 1u64;
        for _ in 1..=6 {
            x = x * 3 % 7;
            seen.insert(x);
        }
        assert_eq!(seen.len(), 6);
        // 2 is not primitive: 2^3 = 1.
        assert_eq!(8 % 7, 1);
    }

    #[test]
    fn worked_products() {
        let gf2 = Field::new(2, 1).unwrap();
        assert_eq!(gf2.add(1, 1), 0);
        let gf4 = Field::new(2, 2).unwrap();
        let x = gf4.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(x.mul(&x).unwrap().coeffs(), vec![1, 1]);
        let gf7 = Field::new(7, 1).unwrap();
        assert_eq!(gf7.elem(3).inv().unwrap().code(), 5);
        assert_eq!(gf7.elem(0).inv(), Err(GfError::DivisionByZero));
    }

    #[test]
    fn mixed_fields_are_rejected() {
        let a = Field::new(3, 1).unwrap().elem(1);
        let b = Field::new(5, 1).unwrap().elem(1);
        assert!(matches!(a.add(&b), Err(GfError::FieldMismatch(..))));
        assert!(matches!(a.mul(&b), Err(GfError::FieldMismatch(..))));
    }

    #[test]
    fn literal_round_trip() {
        let e: FieldElem = "GF(2^2):0,1".parse().unwrap();
        assert_eq!(e.to_string(), "GF(2^2):0,1");
        assert_eq!(e.code(), 2);
        assert!("GF(2^2):0".parse::<FieldElem>().is_err());
        assert!("GF(2^2):0,2".parse::<FieldElem>().is_err());
        assert!("GF(6^1):1".parse::<FieldElem>().is_err());
        assert!("2^2:0,1".parse::<FieldElem>().is_err());
    }

    #[test]
    fn primitive_order_by_exhaustive_powering() {
        for (p, k) in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (3, 3), (11, 1), (13, 1)] {
            let f = Field::new(p, k).unwrap();
            let g = f.primitive_code();
            let mut x = g;
            let mut order = 1u64;
            while x != 1 {
                x = f.mul_by_poly(x, g);
                order += 1;
            }
            assert_eq!(order, f.q() as u64 - 1, "GF({p}^{k})");
            // and it is the smallest such code
            for c in 1..g {
                assert_ne!(f.order(c), Some(f.q() as u64 - 1));
            }
        }
    }

    #[test]
    fn fermat_little_theorem_exhaustive_small_fields() {
        for (p, k) in [(2, 12), (3, 7), (5, 5), (7, 4), (11, 3), (17, 2), (4093, 1), (61, 2)] {
            let f = Field::new(p, k).unwrap();
            if f.q() > 1 << 12 {
                continue;
            }
            for a in 1..f.q() {
                assert_eq!(f.pow(a, f.q() as u64 - 1), 1);
            }
        }
    }

    #[test]
    fn tables_agree_with_polynomial_products() {
        for (p, k) in [(2, 3), (3, 2), (5, 2), (2, 5), (7, 1)] {
            let f = Field::new(p, k).unwrap();
            for a in 0..f.q() {
                for b in 0..f.q() {
                    assert_eq!(f.mul(a, b), f.mul_by_poly(a, b));
                }
            }
        }
    }

    #[test]
    fn frobenius_is_identity_only_for_prime_fields() {
        for (p, k) in [(2, 1), (3, 1), (2, 2), (3, 2), (5, 3)] {
            let f = Field::new(p, k).unwrap();
            let is_identity = f.elements().all(|a| a.frobenius() == a);
            assert_eq!(is_identity, k == 1);
        }
    }

    #[test]
    fn canonical_bytes_and_lex_rank_agree() {
        let f = Field::new(3, 2).unwrap();
        let mut all: Vec<u32> = (0..f.q()).collect();
        all.sort_by_key(|&c| {
            let mut b = Vec::new();
            f.write_canonical(c, &mut b);
            b
        });
        let by_rank: Vec<u32> = (0..f.q()).map(|r| f.from_lex_rank(r)).collect();
        assert_eq!(all, by_rank);
    }

    fn field_strategy() -> impl Strategy<Value = Field> {
        prop::sample::select(vec![(2u64, 1u32), (2, 3), (3, 1), (3, 2), (5, 2), (7, 1), (2, 8), (13, 2)])
            .prop_map(|(p, k)| Field::new(p, k).unwrap())
    }

    proptest! {
        #[test]
        fn field_axioms(f in field_strategy(), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
            let q = f.q();
            let (a, b, c) = (a % q, b % q, c % q);
            prop_assert_eq!(f.add(a, f.add(b, c)), f.add(f.add(a, b), c));
            prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
            prop_assert_eq!(f.add(a, b), f.add(b, a));
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }

        #[test]
        fn frobenius_is_a_ring_homomorphism(f in field_strategy(), a in any::<u32>(), b in any::<u32>()) {
            let q = f.q();
            let (a, b) = (f.elem(a % q), f.elem(b % q));
            prop_assert_eq!(a.add(&b).unwrap().frobenius(), a.frobenius().add(&b.frobenius()).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap().frobenius(), a.frobenius().mul(&b.frobenius()).unwrap());
        }
    }
}
