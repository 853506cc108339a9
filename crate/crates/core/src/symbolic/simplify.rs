//! Canonicalizing simplifier.
//!
//! Normal form:
//! - `Sin`/`Cos` atoms carry no quarter-turn offset and a positive leading
//!   coefficient; the sign and offset are folded into the atom kind and a `Neg`.
//! - Sums are flat, like terms are combined, terms are sorted, and the
//!   constant term comes first. Negation distributes over sums.
//! - Products are flat with an optional positive rational coefficient first.
//!   Any product containing a quotient becomes a single `Quotient`, with
//!   identical numerator and denominator factors cancelled.
//! - A sum used as a factor has a positive leading term; its sign moves to
//!   the enclosing coefficient.
//!
//! Pairs of sum terms that differ only in two trig factors are contracted
//! with the angle-addition identities, e.g. `sin a cos b - cos a sin b`
//! becomes `sin(a - b)`. No product-to-sum expansion is done.

use num_traits::Signed;
use std::cmp::Ordering;
use std::collections::HashMap;

use super::angle::AngleSum;
use super::expr::{ExprKind, Rational, ScalarExpr};

/// Simplify to canonical form. Idempotent.
pub fn simplify(e: &ScalarExpr) -> ScalarExpr {
    Simplifier::default().simp(e)
}

/// Simplify several expressions sharing one memo table.
pub fn simplify_all(es: &[ScalarExpr]) -> Vec<ScalarExpr> {
    let mut s = Simplifier::default();
    es.iter().map(|e| s.simp(e)).collect()
}

fn rat(i: i64) -> Rational {
    Rational::from_integer(i)
}

#[derive(Clone, Debug)]
struct Term {
    coef: Rational,
    factors: Vec<ScalarExpr>,
}

fn cmp_factor_lists(a: &[ScalarExpr], b: &[ScalarExpr]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.canonical_cmp(y);
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Multiset differences `a \ b` and `b \ a` of two sorted factor lists.
fn multiset_diff(a: &[ScalarExpr], b: &[ScalarExpr]) -> (Vec<ScalarExpr>, Vec<ScalarExpr>) {
    let (mut i, mut j) = (0, 0);
    let (mut da, mut db) = (Vec::new(), Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].canonical_cmp(&b[j]) {
            Ordering::Less => {
                da.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                db.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    da.extend_from_slice(&a[i..]);
    db.extend_from_slice(&b[j..]);
    (da, db)
}

/// Canonical `sin(angle)` or `cos(angle)`.
pub(crate) fn trig(is_sin: bool, angle: &AngleSum) -> ScalarExpr {
    let mut negate = false;
    let mut a = angle.clone();
    if a.leading_coefficient().is_some_and(|c| c < 0) {
        a = -&a;
        negate ^= is_sin;
    }
    let q = a.quarter();
    if !a.has_variables() {
        let v = match (is_sin, q) {
            (true, 1) | (false, 0) => 1,
            (true, 3) | (false, 2) => -1,
            _ => 0,
        };
        return ScalarExpr::int(if negate { -v } else { v });
    }
    let base = a.without_offset();
    // sin(x + q pi/2) and cos(x + q pi/2) folded onto sin x / cos x.
    let (use_sin, flip) = match (is_sin, q) {
        (true, 0) => (true, false),
        (true, 1) => (false, false),
        (true, 2) => (true, true),
        (true, _) => (false, true),
        (false, 0) => (false, false),
        (false, 1) => (true, true),
        (false, 2) => (false, true),
        (false, _) => (true, false),
    };
    let atom = if use_sin { ScalarExpr::sin(base) } else { ScalarExpr::cos(base) };
    if negate ^ flip {
        ScalarExpr::negate(atom)
    } else {
        atom
    }
}

fn trig_parts(e: &ScalarExpr) -> Option<(bool, &AngleSum)> {
    match e.kind() {
        ExprKind::Sin(a) => Some((true, a)),
        ExprKind::Cos(a) => Some((false, a)),
        _ => None,
    }
}

#[derive(Default)]
struct Simplifier {
    // Keyed by node address; the key node is kept alive so addresses are not reused.
    memo: HashMap<usize, (ScalarExpr, ScalarExpr)>,
}

impl Simplifier {
    fn simp(&mut self, e: &ScalarExpr) -> ScalarExpr {
        if let Some((_, r)) = self.memo.get(&e.addr()) {
            return r.clone();
        }
        // Children first, iteratively, so deep DAGs don't recurse deeply here.
        for node in e.post_order() {
            if self.memo.contains_key(&node.addr()) {
                continue;
            }
            let mut r = self.simp_node(&node);
            // Keep identity for nodes that were already canonical so sharing survives.
            if r == node {
                r = node.clone();
            }
            self.memo.insert(node.addr(), (node, r));
        }
        self.memo[&e.addr()].1.clone()
    }

    fn done(&self, e: &ScalarExpr) -> ScalarExpr {
        self.memo[&e.addr()].1.clone()
    }

    fn simp_node(&mut self, e: &ScalarExpr) -> ScalarExpr {
        match e.kind() {
            ExprKind::Const(_) | ExprKind::Param(_) => e.clone(),
            ExprKind::Sin(a) => trig(true, a),
            ExprKind::Cos(a) => trig(false, a),
            ExprKind::Neg(x) => {
                let x = self.done(x);
                self.negate(&x)
            }
            ExprKind::Sum(xs) => {
                let mut terms = Vec::new();
                for x in xs {
                    let x = self.done(x);
                    terms.extend(self.terms_of(&x));
                }
                self.build_sum(terms)
            }
            ExprKind::Product(xs) => {
                let xs: Vec<_> = xs.iter().map(|x| self.done(x)).collect();
                self.assemble(rat(1), xs, vec![])
            }
            ExprKind::Quotient(n, d) => {
                let sn = self.done(n);
                let sd = self.done(d);
                if sd.is_zero() {
                    ScalarExpr::quotient_unchecked(sn, d.clone())
                } else {
                    self.assemble(rat(1), vec![sn], vec![sd])
                }
            }
        }
    }

    fn is_singular_quotient(&mut self, e: &ScalarExpr) -> bool {
        match e.kind() {
            ExprKind::Quotient(_, d) => self.simp(d).is_zero(),
            _ => false,
        }
    }

    fn negate(&mut self, x: &ScalarExpr) -> ScalarExpr {
        let terms = self
            .terms_of(x)
            .into_iter()
            .map(|t| Term { coef: -t.coef, factors: t.factors })
            .collect();
        self.build_sum(terms)
    }

    /// Terms of a canonical expression.
    fn terms_of(&self, e: &ScalarExpr) -> Vec<Term> {
        match e.kind() {
            ExprKind::Sum(xs) => xs.iter().map(Self::term_of).collect(),
            _ if e.is_zero() => vec![],
            _ => vec![Self::term_of(e)],
        }
    }

    fn term_of(e: &ScalarExpr) -> Term {
        match e.kind() {
            ExprKind::Const(c) => Term { coef: *c, factors: vec![] },
            ExprKind::Neg(x) => {
                let t = Self::term_of(x);
                Term { coef: -t.coef, factors: t.factors }
            }
            ExprKind::Product(fs) => {
                let mut coef = rat(1);
                let mut factors = Vec::with_capacity(fs.len());
                for f in fs {
                    match f.as_const() {
                        Some(c) => coef *= c,
                        None => factors.push(f.clone()),
                    }
                }
                Term { coef, factors }
            }
            _ => Term { coef: rat(1), factors: vec![e.clone()] },
        }
    }

    fn combine_like_terms(terms: Vec<Term>) -> Vec<Term> {
        let mut terms = terms;
        for t in terms.iter_mut() {
            t.factors.sort_by(|a, b| a.canonical_cmp(b));
        }
        terms.sort_by(|a, b| cmp_factor_lists(&a.factors, &b.factors));
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            if let Some(last) = out.last_mut() {
                if cmp_factor_lists(&last.factors, &t.factors) == Ordering::Equal
                    && last.factors == t.factors
                {
                    last.coef += t.coef;
                    continue;
                }
            }
            out.push(t);
        }
        out.retain(|t| t.coef != rat(0));
        out
    }

    /// Try to merge two terms with an angle-addition identity.
    fn contract(&self, t1: &Term, t2: &Term) -> Option<Term> {
        if t1.factors.len() != t2.factors.len() || t1.factors.len() < 2 {
            return None;
        }
        if t1.coef != t2.coef && t1.coef != -t2.coef {
            return None;
        }
        let (d1, d2) = multiset_diff(&t1.factors, &t2.factors);
        if d1.len() != 2 || d2.len() != 2 {
            return None;
        }
        let (s1, p) = trig_parts(&d1[0])?;
        let (s2, q) = trig_parts(&d1[1])?;
        let (s3, r) = trig_parts(&d2[0])?;
        let (s4, s) = trig_parts(&d2[1])?;
        let same_sign = t1.coef == t2.coef;
        let (coef, replacement) = match (s1, s2, s3, s4) {
            // sin P cos Q (+/-) sin Q cos P = sin(P +/- Q)
            (true, false, true, false) if r == q && s == p => {
                let angle = if same_sign { p + q } else { p - q };
                (t1.coef, trig(true, &angle))
            }
            // cos P cos Q (+/-) sin P sin Q = cos(P -/+ Q)
            (false, false, true, true) if r == p && s == q => {
                let angle = if same_sign { p - q } else { p + q };
                (t1.coef, trig(false, &angle))
            }
            (true, true, false, false) if r == p && s == q => {
                let angle = if same_sign { p - q } else { p + q };
                (t2.coef, trig(false, &angle))
            }
            _ => return None,
        };
        let (mut common, _) = multiset_diff(&t1.factors, &d1);
        let rt = Self::term_of(&replacement);
        common.extend(rt.factors);
        Some(Term { coef: coef * rt.coef, factors: common })
    }

    fn build_sum(&mut self, terms: Vec<Term>) -> ScalarExpr {
        let mut flat = Vec::with_capacity(terms.len());
        for mut t in terms {
            t.coef *= contract_double_angles(&mut t.factors);
            match t.factors.as_slice() {
                [single] if matches!(single.kind(), ExprKind::Sum(_)) => {
                    let coef = t.coef;
                    flat.extend(self.terms_of(single).into_iter().map(|u| Term {
                        coef: u.coef * coef,
                        factors: u.factors,
                    }));
                }
                _ => flat.push(t),
            }
        }
        let mut terms = Self::combine_like_terms(flat);
        'outer: loop {
            for i in 0..terms.len() {
                for j in (i + 1)..terms.len() {
                    if let Some(mut t) = self.contract(&terms[i], &terms[j]) {
                        terms.remove(j);
                        terms.remove(i);
                        t.coef *= contract_double_angles(&mut t.factors);
                        terms.push(t);
                        terms = Self::combine_like_terms(terms);
                        continue 'outer;
                    }
                }
            }
            break;
        }
        let mut exprs: Vec<ScalarExpr> = terms.into_iter().map(|t| self.term_expr(t)).collect();
        match exprs.len() {
            0 => ScalarExpr::zero(),
            1 => exprs.pop().unwrap(),
            _ => ScalarExpr::from_kind(ExprKind::Sum(exprs)),
        }
    }

    fn term_expr(&mut self, t: Term) -> ScalarExpr {
        if t.factors.is_empty() {
            return ScalarExpr::constant(t.coef);
        }
        let has_quotient = t
            .factors
            .iter()
            .any(|f| matches!(f.kind(), ExprKind::Quotient(..)));
        if has_quotient && !(t.factors.len() == 1 && t.coef.abs() == rat(1)) {
            return self.assemble(t.coef, t.factors, vec![]);
        }
        signed_product(t.coef, t.factors)
    }

    /// Normal form of `coef * prod(num) / prod(den)` for canonical inputs.
    fn assemble(&mut self, coef: Rational, num: Vec<ScalarExpr>, den: Vec<ScalarExpr>) -> ScalarExpr {
        let mut acc = Acc { coef, num: vec![], den: vec![] };
        for x in num {
            self.push_factor(&mut acc, x, true);
        }
        for x in den {
            self.push_factor(&mut acc, x, false);
        }
        if acc.coef == rat(0) {
            return ScalarExpr::zero();
        }
        acc.num.sort_by(|a, b| a.canonical_cmp(b));
        acc.den.sort_by(|a, b| a.canonical_cmp(b));
        let (mut num, mut den) = multiset_diff(&acc.num, &acc.den);
        acc.coef *= contract_double_angles(&mut num);
        acc.coef /= contract_double_angles(&mut den);
        let (num, den) = multiset_diff(&num, &den);
        if den.is_empty() {
            return self.scaled(acc.coef, num);
        }
        let negative = acc.coef < rat(0);
        let numerator = self.scaled(acc.coef.abs(), num);
        let denominator = signed_product(rat(1), den);
        let q = ScalarExpr::quotient_unchecked(numerator, denominator);
        if negative {
            ScalarExpr::negate(q)
        } else {
            q
        }
    }

    /// `coef * prod(factors)`, distributing the coefficient over a lone sum.
    fn scaled(&mut self, coef: Rational, factors: Vec<ScalarExpr>) -> ScalarExpr {
        if let [single] = factors.as_slice() {
            if matches!(single.kind(), ExprKind::Sum(_)) {
                let terms = self
                    .terms_of(single)
                    .into_iter()
                    .map(|u| Term { coef: u.coef * coef, factors: u.factors })
                    .collect();
                return self.build_sum(terms);
            }
        }
        signed_product(coef, factors)
    }

    fn push_factor(&mut self, acc: &mut Acc, x: ScalarExpr, into_num: bool) {
        match x.kind() {
            ExprKind::Const(c) => {
                if into_num {
                    acc.coef *= *c;
                } else {
                    acc.coef /= *c;
                }
            }
            ExprKind::Neg(y) => {
                acc.coef = -acc.coef;
                self.push_factor(acc, y.clone(), into_num);
            }
            ExprKind::Product(fs) => {
                for f in fs {
                    self.push_factor(acc, f.clone(), into_num);
                }
            }
            ExprKind::Quotient(n, d) if !self.is_singular_quotient(&x) => {
                self.push_factor(acc, n.clone(), into_num);
                self.push_factor(acc, d.clone(), !into_num);
            }
            ExprKind::Sum(xs) => {
                let leading_negative = xs
                    .first()
                    .map(|t| Self::term_of(t).coef < rat(0))
                    .unwrap_or(false);
                let f = if leading_negative {
                    acc.coef = -acc.coef;
                    self.negate(&x)
                } else {
                    x.clone()
                };
                if into_num {
                    acc.num.push(f);
                } else {
                    acc.den.push(f);
                }
            }
            _ => {
                if into_num {
                    acc.num.push(x);
                } else {
                    acc.den.push(x);
                }
            }
        }
    }
}

/// Replaces each `sin x * cos x` pair in `factors` by `sin 2x` and returns
/// the accumulated scale (a power of 1/2).
fn contract_double_angles(factors: &mut Vec<ScalarExpr>) -> Rational {
    let mut scale = rat(1);
    'search: loop {
        for i in 0..factors.len() {
            let ExprKind::Sin(x) = factors[i].kind() else { continue };
            for j in 0..factors.len() {
                if matches!(factors[j].kind(), ExprKind::Cos(y) if y == x) {
                    let doubled = trig(true, &(x + x));
                    let (hi, lo) = if i > j { (i, j) } else { (j, i) };
                    factors.remove(hi);
                    factors.remove(lo);
                    factors.push(doubled);
                    factors.sort_by(|a, b| a.canonical_cmp(b));
                    scale /= rat(2);
                    continue 'search;
                }
            }
        }
        return scale;
    }
}

struct Acc {
    coef: Rational,
    num: Vec<ScalarExpr>,
    den: Vec<ScalarExpr>,
}

/// `coef * prod(factors)` for sorted canonical factors without quotients.
fn signed_product(coef: Rational, factors: Vec<ScalarExpr>) -> ScalarExpr {
    if factors.is_empty() || coef == rat(0) {
        return ScalarExpr::constant(coef);
    }
    let mag = coef.abs();
    let body = if mag == rat(1) && factors.len() == 1 {
        factors.into_iter().next().unwrap()
    } else {
        let mut items = Vec::with_capacity(factors.len() + 1);
        if mag != rat(1) {
            items.push(ScalarExpr::constant(mag));
        }
        items.extend(factors);
        ScalarExpr::from_kind(ExprKind::Product(items))
    };
    if coef < rat(0) {
        ScalarExpr::negate(body)
    } else {
        body
    }
}
