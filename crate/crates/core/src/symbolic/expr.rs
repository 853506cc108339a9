use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::Rational64;

use super::angle::{AngleSum, AngleVar};
use super::SymbolicError;

/// Exact rational constant.
pub type Rational = Rational64;

/// Node variants of a scalar expression.
#[derive(Debug)]
pub enum ExprKind {
    Const(Rational),
    Param(String),
    Sin(AngleSum),
    Cos(AngleSum),
    Sum(Vec<ScalarExpr>),
    Product(Vec<ScalarExpr>),
    Quotient(ScalarExpr, ScalarExpr),
    Neg(ScalarExpr),
}

#[derive(Debug)]
struct Node {
    kind: ExprKind,
    hash: u64,
}

/// Immutable, reference-counted scalar expression.
///
/// Sub-expressions are shared, so a model is a DAG rather than a tree. All
/// traversals in this crate memoize on node identity. Equality is structural,
/// with a pointer shortcut and a cached structural hash as a pre-check.
#[derive(Clone)]
pub struct ScalarExpr(Arc<Node>);

/// FNV-1a; stable across runs so canonical ordering and output are reproducible.
struct Fnv(u64);

impl Hasher for Fnv {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= *b as u64;
            self.0 = self.0.wrapping_mul(0x100_0000_01b3);
        }
    }
}

fn structural_hash(kind: &ExprKind) -> u64 {
    let mut h = Fnv(0xcbf2_9ce4_8422_2325);
    match kind {
        ExprKind::Const(c) => {
            0u8.hash(&mut h);
            c.numer().hash(&mut h);
            c.denom().hash(&mut h);
        }
        ExprKind::Param(p) => {
            1u8.hash(&mut h);
            p.hash(&mut h);
        }
        ExprKind::Sin(a) => {
            2u8.hash(&mut h);
            a.hash(&mut h);
        }
        ExprKind::Cos(a) => {
            3u8.hash(&mut h);
            a.hash(&mut h);
        }
        ExprKind::Sum(xs) => {
            4u8.hash(&mut h);
            xs.len().hash(&mut h);
            for x in xs {
                x.0.hash.hash(&mut h);
            }
        }
        ExprKind::Product(xs) => {
            5u8.hash(&mut h);
            xs.len().hash(&mut h);
            for x in xs {
                x.0.hash.hash(&mut h);
            }
        }
        ExprKind::Quotient(n, d) => {
            6u8.hash(&mut h);
            n.0.hash.hash(&mut h);
            d.0.hash.hash(&mut h);
        }
        ExprKind::Neg(x) => {
            7u8.hash(&mut h);
            x.0.hash.hash(&mut h);
        }
    }
    h.finish()
}

impl ScalarExpr {
    fn new(kind: ExprKind) -> Self {
        let hash = structural_hash(&kind);
        ScalarExpr(Arc::new(Node { kind, hash }))
    }

    pub fn kind(&self) -> &ExprKind {
        &self.0.kind
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(ExprKind::Const(c))
    }

    pub fn int(i: i64) -> Self {
        Self::constant(Rational::from_integer(i))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn param(name: impl Into<String>) -> Self {
        Self::new(ExprKind::Param(name.into()))
    }

    pub fn sin(angle: impl Into<AngleSum>) -> Self {
        Self::new(ExprKind::Sin(angle.into()))
    }

    pub fn cos(angle: impl Into<AngleSum>) -> Self {
        Self::new(ExprKind::Cos(angle.into()))
    }

    /// Raw n-ary sum. An empty list is the constant 0 and a single item is returned as is.
    pub fn sum(items: Vec<ScalarExpr>) -> Self {
        match items.len() {
            0 => Self::zero(),
            1 => items.into_iter().next().unwrap(),
            _ => Self::new(ExprKind::Sum(items)),
        }
    }

    /// Raw n-ary product. An empty list is the constant 1.
    pub fn product(items: Vec<ScalarExpr>) -> Self {
        match items.len() {
            0 => Self::one(),
            1 => items.into_iter().next().unwrap(),
            _ => Self::new(ExprKind::Product(items)),
        }
    }

    /// Quotient node; the denominator may not be the literal constant zero.
    pub fn quotient(numerator: ScalarExpr, denominator: ScalarExpr) -> Result<Self, SymbolicError> {
        if denominator.is_zero() {
            return Err(SymbolicError::ZeroDenominator);
        }
        Ok(Self::new(ExprKind::Quotient(numerator, denominator)))
    }

    /// Quotient node without the literal-zero check; used where the simplifier
    /// preserves a singular denominator unchanged.
    pub(crate) fn quotient_unchecked(numerator: ScalarExpr, denominator: ScalarExpr) -> Self {
        Self::new(ExprKind::Quotient(numerator, denominator))
    }

    pub fn negate(x: ScalarExpr) -> Self {
        Self::new(ExprKind::Neg(x))
    }

    pub(crate) fn from_kind(kind: ExprKind) -> Self {
        Self::new(kind)
    }

    pub fn as_const(&self) -> Option<Rational> {
        match self.kind() {
            ExprKind::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(|c| c == Rational::from_integer(0))
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(|c| c == Rational::from_integer(1))
    }

    pub fn ptr_eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub(crate) fn addr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn structural_hash(&self) -> u64 {
        self.0.hash
    }

    pub fn children(&self) -> Vec<&ScalarExpr> {
        match self.kind() {
            ExprKind::Const(_) | ExprKind::Param(_) | ExprKind::Sin(_) | ExprKind::Cos(_) => vec![],
            ExprKind::Sum(xs) | ExprKind::Product(xs) => xs.iter().collect(),
            ExprKind::Quotient(n, d) => vec![n, d],
            ExprKind::Neg(x) => vec![x],
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(
            self.kind(),
            ExprKind::Const(_) | ExprKind::Param(_) | ExprKind::Sin(_) | ExprKind::Cos(_)
        )
    }

    /// Nodes of the DAG rooted here in post-order, each visited once.
    pub fn post_order(&self) -> Vec<ScalarExpr> {
        post_order(std::slice::from_ref(self))
    }

    /// Angle variables referenced anywhere in the expression.
    pub fn angle_vars(&self) -> HashSet<AngleVar> {
        let mut out = HashSet::new();
        for n in self.post_order() {
            if let ExprKind::Sin(a) | ExprKind::Cos(a) = n.kind() {
                out.extend(a.variables());
            }
        }
        out
    }

    pub fn params(&self) -> HashSet<String> {
        self.post_order()
            .into_iter()
            .filter_map(|n| match n.kind() {
                ExprKind::Param(p) => Some(p.clone()),
                _ => None,
            })
            .collect()
    }

    /// Size of the expression if it were written out as a tree. Saturates.
    pub fn tree_size(&self) -> u64 {
        let mut memo: HashMap<usize, u64> = HashMap::new();
        for n in self.post_order() {
            let s = n
                .children()
                .iter()
                .fold(1u64, |acc, c| acc.saturating_add(memo[&c.addr()]));
            memo.insert(n.addr(), s);
        }
        memo[&self.addr()]
    }

    fn rank(&self) -> u8 {
        match self.kind() {
            ExprKind::Const(_) => 0,
            ExprKind::Param(_) => 1,
            ExprKind::Sin(_) => 2,
            ExprKind::Cos(_) => 3,
            ExprKind::Sum(_) => 4,
            ExprKind::Product(_) => 5,
            ExprKind::Quotient(..) => 6,
            ExprKind::Neg(_) => 7,
        }
    }

    /// Total order used for canonical sorting: constants, parameters, sines,
    /// cosines, then compound nodes. Atoms compare by content, compound
    /// nodes by structural hash with a structural tie-break.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        if self.ptr_eq(other) {
            return Ordering::Equal;
        }
        let r = self.rank().cmp(&other.rank());
        if r != Ordering::Equal {
            return r;
        }
        match (self.kind(), other.kind()) {
            (ExprKind::Const(a), ExprKind::Const(b)) => a.cmp(b),
            (ExprKind::Param(a), ExprKind::Param(b)) => a.cmp(b),
            (ExprKind::Sin(a), ExprKind::Sin(b)) | (ExprKind::Cos(a), ExprKind::Cos(b)) => a.cmp(b),
            _ => self.0.hash.cmp(&other.0.hash).then_with(|| self.cmp_children(other)),
        }
    }

    fn cmp_children(&self, other: &Self) -> Ordering {
        let a = self.children();
        let b = other.children();
        a.len().cmp(&b.len()).then_with(|| {
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| x.canonical_cmp(y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
    }
}

pub(crate) fn post_order(roots: &[ScalarExpr]) -> Vec<ScalarExpr> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    // Explicit stack: (node, children_pushed)
    let mut stack: Vec<(ScalarExpr, bool)> = roots.iter().rev().map(|r| (r.clone(), false)).collect();
    while let Some((node, expanded)) = stack.pop() {
        if expanded {
            if seen.insert(node.addr()) {
                out.push(node);
            }
            continue;
        }
        if seen.contains(&node.addr()) {
            continue;
        }
        stack.push((node.clone(), true));
        for c in node.children().into_iter().rev() {
            if !seen.contains(&c.addr()) {
                stack.push((c.clone(), false));
            }
        }
    }
    out
}

/// Number of structurally distinct nodes across a set of expressions.
pub fn distinct_node_count(roots: &[ScalarExpr]) -> usize {
    post_order(roots).into_iter().collect::<HashSet<_>>().len()
}

impl PartialEq for ScalarExpr {
    fn eq(&self, other: &Self) -> bool {
        if self.ptr_eq(other) {
            return true;
        }
        if self.0.hash != other.0.hash {
            return false;
        }
        match (self.kind(), other.kind()) {
            (ExprKind::Const(a), ExprKind::Const(b)) => a == b,
            (ExprKind::Param(a), ExprKind::Param(b)) => a == b,
            (ExprKind::Sin(a), ExprKind::Sin(b)) | (ExprKind::Cos(a), ExprKind::Cos(b)) => a == b,
            (ExprKind::Sum(a), ExprKind::Sum(b)) | (ExprKind::Product(a), ExprKind::Product(b)) => a == b,
            (ExprKind::Quotient(n1, d1), ExprKind::Quotient(n2, d2)) => n1 == n2 && d1 == d2,
            (ExprKind::Neg(a), ExprKind::Neg(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for ScalarExpr {}

impl Hash for ScalarExpr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl fmt::Debug for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            ExprKind::Const(c) => write!(f, "{c}"),
            ExprKind::Param(p) => f.write_str(p),
            ExprKind::Sin(a) => write!(f, "sin({a})"),
            ExprKind::Cos(a) => write!(f, "cos({a})"),
            ExprKind::Sum(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
            ExprKind::Product(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
            ExprKind::Quotient(n, d) => write!(f, "({n})/({d})"),
            ExprKind::Neg(x) => write!(f, "-({x})"),
        }
    }
}

impl Add for ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, rhs: ScalarExpr) -> ScalarExpr {
        ScalarExpr::sum(vec![self, rhs])
    }
}

impl Add for &ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, rhs: &ScalarExpr) -> ScalarExpr {
        ScalarExpr::sum(vec![self.clone(), rhs.clone()])
    }
}

impl Sub for ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: ScalarExpr) -> ScalarExpr {
        ScalarExpr::sum(vec![self, ScalarExpr::negate(rhs)])
    }
}

impl Sub for &ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: &ScalarExpr) -> ScalarExpr {
        self.clone() - rhs.clone()
    }
}

impl Mul for ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: ScalarExpr) -> ScalarExpr {
        ScalarExpr::product(vec![self, rhs])
    }
}

impl Mul for &ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: &ScalarExpr) -> ScalarExpr {
        ScalarExpr::product(vec![self.clone(), rhs.clone()])
    }
}

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr::negate(self)
    }
}

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr::negate(self.clone())
    }
}
