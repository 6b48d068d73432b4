//! Class groups of imaginary quadratic fields via reduced positive-definite
//! binary quadratic forms: reduction, Gauss composition, element orders, class
//! number, group exponent, and the order-g membership test.
//!
//! A form (a, b, c) represents a x^2 + b xy + c y^2 with discriminant
//! b^2 - 4ac < 0. Reduced forms (|b| <= a <= c, b >= 0 when |b| = a or a = c)
//! biject with form classes, and Gauss composition realizes the group law.

use crate::arith::{self, Factorization};
use crate::{Error, Result};

/// A negative fundamental discriminant together with the square-free D that
/// produced it: delta = -D when D = 3 (mod 4), else -4D.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Discriminant {
    value: i128,
    source_d: u64,
}

impl Discriminant {
    /// The discriminant value (negative, 0 or 1 mod 4).
    pub fn value(&self) -> i128 {
        self.value
    }

    /// The positive square-free integer this discriminant was built from.
    pub fn source_d(&self) -> u64 {
        self.source_d
    }
}

/// Field discriminant of Q(sqrt(-D)) for square-free D >= 1.
pub fn discriminant_of(d: u64) -> Result<Discriminant> {
    if d == 0 {
        return Err(Error::Domain("discriminant_of requires D >= 1".into()));
    }
    if !arith::is_squarefree_u64(d) {
        return Err(Error::Domain(format!("D = {d} is not square-free")));
    }
    let value = if d % 4 == 3 {
        -(d as i128)
    } else {
        -4 * d as i128
    };
    Ok(Discriminant { value, source_d: d })
}

/// Positive-definite integral binary quadratic form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QForm {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

impl std::fmt::Display for QForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

impl QForm {
    pub fn new(a: i128, b: i128, c: i128) -> Self {
        QForm { a, b, c }
    }

    /// b^2 - 4ac.
    pub fn discriminant(&self) -> i128 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// Principal form of discriminant delta (delta < 0, 0 or 1 mod 4).
    pub fn identity(delta: i128) -> QForm {
        if delta.rem_euclid(4) == 0 {
            QForm::new(1, 0, -delta / 4)
        } else {
            QForm::new(1, 1, (1 - delta) / 4)
        }
    }

    /// Inverse class: (a, -b, c), reduced.
    pub fn inverse(&self) -> QForm {
        QForm::new(self.a, -self.b, self.c)
            .reduced()
            .expect("inverse of a definite form is definite")
    }

    /// True for the canonical representative: |b| <= a <= c with b >= 0 when
    /// |b| = a or a = c.
    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        if b.abs() > a || a > c {
            return false;
        }
        if (b.abs() == a || a == c) && b < 0 {
            return false;
        }
        true
    }

    /// The unique reduced form equivalent to this one. Errors on forms that
    /// are not positive definite.
    pub fn reduced(&self) -> Result<QForm> {
        let d = self.discriminant();
        if d >= 0 {
            return Err(Error::Domain(format!(
                "form {self} has non-negative discriminant {d}"
            )));
        }
        if self.a <= 0 {
            return Err(Error::Domain(format!("form {self} is not positive definite")));
        }
        let (mut a, mut b) = (self.a, self.b);
        let c = loop {
            // Normalize b into (-a, a].
            let two_a = 2 * a;
            let mut r = b.rem_euclid(two_a);
            if r > a {
                r -= two_a;
            }
            b = r;
            let c = (b * b - d) / (4 * a);
            if a > c {
                (a, b) = (c, -b);
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            break c;
        };
        Ok(QForm::new(a, b, c))
    }

    /// Class power by repeated squaring.
    pub fn pow(&self, e: u64) -> Result<QForm> {
        let delta = self.discriminant();
        let mut result = QForm::identity(delta);
        let mut base = self.reduced()?;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = compose(&result, &base)?;
            }
            if e > 1 {
                base = compose(&base, &base)?;
            }
            e >>= 1;
        }
        Ok(result)
    }
}

fn ext_gcd3(a: i128, b: i128, c: i128) -> (i128, i128, i128, i128) {
    let (g1, u1, v1) = arith::ext_gcd(a, b);
    let (g, s, w) = arith::ext_gcd(g1, c);
    (g, s * u1, s * v1, w)
}

/// Gauss composition: reduced representative of the product class.
pub fn compose(f: &QForm, g: &QForm) -> Result<QForm> {
    let d = f.discriminant();
    if d != g.discriminant() {
        return Err(Error::Domain(format!(
            "cannot compose forms of discriminants {} and {}",
            d,
            g.discriminant()
        )));
    }
    if d >= 0 {
        return Err(Error::Domain(
            "composition requires negative discriminant".into(),
        ));
    }
    let half_sum = (f.b + g.b) / 2;
    let (e, _u, v, w) = ext_gcd3(f.a, g.a, half_sum);
    let a_new = f.a / e * (g.a / e);
    let half_diff = (f.b - g.b) / 2;
    let inner = v * half_diff - w * g.c;
    let b_raw = g.b + 2 * (g.a / e) * inner;
    let two_a = 2 * a_new;
    let b_new = b_raw.rem_euclid(two_a);
    let c_new = (b_new * b_new - d) / (4 * a_new);
    debug_assert_eq!(b_new * b_new - 4 * a_new * c_new, d);
    QForm::new(a_new, b_new, c_new).reduced()
}

/// All primitive reduced forms of discriminant delta, sorted by (a, b).
///
/// Enumerates a <= sqrt(|delta|/3) and recovers b from the square roots of
/// delta modulo 4a.
pub fn reduced_forms(delta: i128) -> Result<Vec<QForm>> {
    if delta >= 0 || delta.rem_euclid(4) > 1 {
        return Err(Error::Domain(format!(
            "{delta} is not a negative discriminant"
        )));
    }
    let a_max = arith::isqrt_u128(delta.unsigned_abs() / 3) as i128;
    let mut out = Vec::new();
    for a in 1..=a_max.max(1) {
        let modulus = 4 * a as u128;
        let fact = arith::factorize(modulus)?;
        // Square roots of delta modulo 4a, prime power by prime power.
        let mut root_sets: Vec<Vec<(i128, u128)>> = Vec::with_capacity(fact.omega());
        let mut empty = false;
        for &(p, k) in fact.pairs() {
            let pk = p.pow(k);
            let roots = arith::hensel_sqrt(delta, p as u64, k)?;
            if roots.is_empty() {
                empty = true;
                break;
            }
            root_sets.push(roots.into_iter().map(|r| (r as i128, pk)).collect());
        }
        if empty {
            continue;
        }
        let mut combos: Vec<Vec<(i128, u128)>> = vec![Vec::new()];
        for set in &root_sets {
            let mut next = Vec::with_capacity(combos.len() * set.len());
            for combo in &combos {
                for &pair in set {
                    let mut c2 = combo.clone();
                    c2.push(pair);
                    next.push(c2);
                }
            }
            combos = next;
        }
        for combo in combos {
            let (r, _) = arith::crt(&combo)?;
            let r = r as i128;
            // At most one b in [-a, a] per residue class mod 4a.
            let b = if r <= a {
                r
            } else if r >= 3 * a {
                r - 4 * a
            } else {
                continue;
            };
            let c = (b * b - delta) / (4 * a);
            if c < a {
                continue;
            }
            if (b.abs() == a || a == c) && b < 0 {
                continue;
            }
            let g = arith::gcd_u128(
                arith::gcd_u128(a as u128, b.unsigned_abs()),
                c as u128,
            );
            if g != 1 {
                continue;
            }
            out.push(QForm::new(a, b, c));
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Class number h(delta) by reduced-form enumeration.
pub fn class_number(disc: &Discriminant) -> u64 {
    reduced_forms(disc.value())
        .expect("fundamental discriminant")
        .len() as u64
}

/// Exact multiplicative order of the class of f, given the factorization of
/// the class number (or any multiple of the order).
pub fn element_order(f: &QForm, h_fact: &Factorization) -> Result<u64> {
    let delta = f.discriminant();
    let identity = QForm::identity(delta);
    let mut order = h_fact.value() as u64;
    for &(p, e) in h_fact.pairs() {
        let p = p as u64;
        order /= p.pow(e);
        let mut fp = f.pow(order)?;
        while fp != identity {
            fp = fp.pow(p)?;
            order *= p;
        }
    }
    Ok(order)
}

/// Summary of the class group of a fundamental discriminant.
#[derive(Debug, Clone)]
pub struct ClassGroupSummary {
    pub disc: Discriminant,
    pub h: u64,
    pub exponent: u64,
    pub reduced_forms: Vec<QForm>,
}

/// Enumerate the class group: h, group exponent, and the reduced forms.
pub fn class_group_summary(disc: &Discriminant) -> Result<ClassGroupSummary> {
    let forms = reduced_forms(disc.value())?;
    let h = forms.len() as u64;
    let h_fact = arith::factorize(h as u128)?;
    let mut exponent = 1u64;
    for f in &forms {
        let o = element_order(f, &h_fact)?;
        exponent = exponent / arith::gcd_u64(exponent, o) * o;
        if exponent == h {
            break;
        }
    }
    Ok(ClassGroupSummary {
        disc: *disc,
        h,
        exponent,
        reduced_forms: forms,
    })
}

/// True iff Cl(delta) contains an element of order g, i.e. g divides the
/// group exponent. Early-exits on a running lcm of element orders.
pub fn has_element_of_order(disc: &Discriminant, g: u64) -> bool {
    if g == 1 {
        return true;
    }
    let forms = reduced_forms(disc.value()).expect("fundamental discriminant");
    let h = forms.len() as u64;
    if h % g != 0 {
        return false;
    }
    let h_fact = arith::factorize(h as u128).expect("within cap");
    let mut running_lcm = 1u64;
    for f in &forms {
        let o = element_order(f, &h_fact).expect("order computation");
        running_lcm = running_lcm / arith::gcd_u64(running_lcm, o) * o;
        if running_lcm % g == 0 {
            return true;
        }
    }
    false
}

/// A reduced form whose class has order exactly g, when one exists.
///
/// Built one prime power of g at a time; the product of elements of coprime
/// prime-power orders has order g.
pub fn order_certificate(disc: &Discriminant, g: u64) -> Result<Option<QForm>> {
    let delta = disc.value();
    if g == 1 {
        return Ok(Some(QForm::identity(delta)));
    }
    let forms = reduced_forms(delta)?;
    let h = forms.len() as u64;
    if h % g != 0 {
        return Ok(None);
    }
    let h_fact = arith::factorize(h as u128)?;
    let g_fact = arith::factorize(g as u128)?;
    let mut cert = QForm::identity(delta);
    for &(q, e) in g_fact.pairs() {
        let qe = (q as u64).pow(e);
        let mut found = None;
        for f in &forms {
            let o = element_order(f, &h_fact)?;
            if o % qe == 0 {
                found = Some(f.pow(o / qe)?);
                break;
            }
        }
        match found {
            Some(x) => cert = compose(&cert, &x)?,
            None => return Ok(None),
        }
    }
    debug_assert_eq!(
        element_order(&cert, &arith::factorize(h as u128)?)?,
        g,
        "certificate order mismatch"
    );
    Ok(Some(cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn discriminant_of_examples() {
        assert_eq!(discriminant_of(3).unwrap().value(), -3);
        assert_eq!(discriminant_of(1).unwrap().value(), -4);
        assert_eq!(discriminant_of(97).unwrap().value(), -388);
        assert!(discriminant_of(12).is_err());
        assert!(discriminant_of(0).is_err());
    }

    #[test]
    fn reduce_examples() {
        let f = QForm::new(1, 1, 6);
        assert_eq!(f.reduced().unwrap(), f);
        // (6, 1, 1) swaps down to the principal form of -23.
        assert_eq!(QForm::new(6, 1, 1).reduced().unwrap(), QForm::new(1, 1, 6));
        // (2, -1, 3) is already reduced: |b| < a < c. It is the inverse class
        // of (2, 1, 3), not the same class; h(-23) = 3 depends on that.
        assert_eq!(
            QForm::new(2, -1, 3).reduced().unwrap(),
            QForm::new(2, -1, 3)
        );
        assert!(QForm::new(1, 5, 1).reduced().is_err()); // discriminant 21 > 0
    }

    #[test]
    fn reduce_is_idempotent_on_enumerated_forms() {
        for delta in [-23i128, -47, -84, -388, -1000003] {
            if delta.rem_euclid(4) > 1 {
                continue;
            }
            for f in reduced_forms(delta).unwrap() {
                assert!(f.is_reduced());
                assert_eq!(f.reduced().unwrap(), f);
                assert_eq!(f.discriminant(), delta);
            }
        }
    }

    #[test]
    fn compose_identity_and_inverse_laws() {
        let delta = -23;
        let id = QForm::identity(delta);
        let f = QForm::new(2, 1, 3);
        assert_eq!(compose(&id, &f).unwrap(), f.reduced().unwrap());
        assert_eq!(compose(&f, &f.inverse()).unwrap(), id);
        // Cl(-23) is cyclic of order 3: squaring the generator gives its inverse.
        assert_eq!(compose(&f, &f).unwrap(), QForm::new(2, -1, 3));
        let g = QForm::new(1, 0, 1); // discriminant -4
        assert!(compose(&f, &g).is_err());
    }

    #[test]
    fn class_number_examples() {
        assert_eq!(class_number(&discriminant_of(1).unwrap()), 1); // -4
        assert_eq!(class_number(&discriminant_of(23).unwrap()), 3);
        assert_eq!(class_number(&discriminant_of(47).unwrap()), 5);
        // Heegner discriminants.
        for d in [1u64, 2, 3, 7, 11, 19, 43, 67, 163] {
            assert_eq!(class_number(&discriminant_of(d).unwrap()), 1, "D={d}");
        }
        assert_eq!(reduced_forms(-68).unwrap().len(), 4);
    }

    #[test]
    fn element_order_examples() {
        let disc = discriminant_of(23).unwrap();
        let h_fact = arith::factorize(3).unwrap();
        let id = QForm::identity(disc.value());
        assert_eq!(element_order(&id, &h_fact).unwrap(), 1);
        assert_eq!(element_order(&QForm::new(2, 1, 3), &h_fact).unwrap(), 3);
        // Ambiguous forms have order dividing 2.
        let disc84 = discriminant_of(21).unwrap(); // delta = -84
        let forms = reduced_forms(disc84.value()).unwrap();
        let h_fact = arith::factorize(forms.len() as u128).unwrap();
        for f in &forms {
            if *f == f.inverse() && *f != QForm::identity(-84) {
                assert_eq!(element_order(f, &h_fact).unwrap(), 2);
            }
        }
    }

    #[test]
    fn has_element_of_order_examples() {
        assert!(has_element_of_order(&discriminant_of(23).unwrap(), 3));
        assert!(!has_element_of_order(&discriminant_of(1).unwrap(), 2));
        assert!(has_element_of_order(&discriminant_of(21).unwrap(), 2)); // delta -84
        assert!(has_element_of_order(&discriminant_of(17).unwrap(), 4)); // delta -68, Z/4
    }

    #[test]
    fn order_certificate_has_stated_order() {
        for (d, g) in [(23u64, 3u64), (17, 4), (21, 2), (47, 5)] {
            let disc = discriminant_of(d).unwrap();
            let cert = order_certificate(&disc, g).unwrap().unwrap();
            let h = class_number(&disc);
            let h_fact = arith::factorize(h as u128).unwrap();
            assert_eq!(element_order(&cert, &h_fact).unwrap(), g);
        }
        assert!(order_certificate(&discriminant_of(1).unwrap(), 2)
            .unwrap()
            .is_none());
    }

    #[test]
    fn group_laws_hold_on_full_tables() {
        // Exhaustive multiplication tables for |delta| <= 400 here; the
        // acceptance suite pushes the same check to 2000.
        for delta in (-400i128..0).filter(|d| d.rem_euclid(4) <= 1) {
            let forms = reduced_forms(delta).unwrap();
            let id = QForm::identity(delta);
            assert!(forms.contains(&id), "identity missing for {delta}");
            for f in &forms {
                assert_eq!(compose(f, &id).unwrap(), *f);
                assert_eq!(compose(f, &f.inverse()).unwrap(), id);
                for g in &forms {
                    let fg = compose(f, g).unwrap();
                    assert!(forms.contains(&fg), "closure failed for {delta}");
                    assert_eq!(fg, compose(g, f).unwrap());
                    for k in &forms {
                        assert_eq!(
                            compose(&fg, k).unwrap(),
                            compose(f, &compose(g, k).unwrap()).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn exponent_divides_class_number() {
        for d in 1..200u64 {
            if !arith::is_squarefree_u64(d) {
                continue;
            }
            let disc = discriminant_of(d).unwrap();
            let summary = class_group_summary(&disc).unwrap();
            assert_eq!(summary.h % summary.exponent, 0, "D={d}");
            let h_fact = arith::factorize(summary.h as u128).unwrap();
            for f in &summary.reduced_forms {
                let o = element_order(f, &h_fact).unwrap();
                assert_eq!(summary.exponent % o, 0, "D={d} form {f}");
            }
        }
    }

    /// Apply a unimodular substitution to a form (test-only).
    fn transform(f: &QForm, m: [i128; 4]) -> QForm {
        let [p, q, r, s] = m;
        debug_assert_eq!((p * s - q * r).abs(), 1);
        let eval = |x: i128, y: i128| f.a * x * x + f.b * x * y + f.c * y * y;
        QForm::new(
            eval(p, r),
            2 * (f.a * p * q + f.c * r * s) + f.b * (p * s + q * r),
            eval(q, s),
        )
    }

    proptest! {
        #[test]
        fn reduction_is_class_invariant(
            d in 1u64..2000,
            steps in proptest::collection::vec((0u8..2, -3i128..=3), 1..6)
        ) {
            // Random form of a valid discriminant, pushed around by random
            // unimodular matrices; reduction must land back on the same form.
            if !arith::is_squarefree_u64(d) {
                return Ok(());
            }
            let disc = discriminant_of(d).unwrap();
            let forms = reduced_forms(disc.value()).unwrap();
            let f = forms[(d as usize * 7) % forms.len()];
            let mut g = f;
            for (kind, k) in steps {
                let m = if kind == 0 {
                    [1, k, 0, 1] // translation
                } else {
                    [0, -1, 1, 0] // inversion
                };
                g = transform(&g, m);
            }
            prop_assert_eq!(g.discriminant(), f.discriminant());
            prop_assert_eq!(g.reduced().unwrap(), f);
        }
    }
}
