//! Admissible words, cylinder intervals and full cylinders.
//!
//! Cylinders are computed by interval refinement. On a cylinder `I(w)` of
//! order `k` the map `T^k` is affine, `x ↦ β^k (x − left)`, and sends `I(w)`
//! onto `[0, r)` for a *tail* `r ∈ (0, 1]`. Appending digit `d` is admissible
//! iff `d/β < r`, and the child tail is `min(βr − d, 1)`. The cylinder length
//! is `r β^{-k}`, so a cylinder is full exactly when its tail is 1.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beta::{BetaSystem, Word};
use crate::error::{argument, domain, Error, Result};

/// Relative tolerance for fullness and for discarding empty refinements.
pub const FULL_TOLERANCE: f64 = 1e-9;

/// Default cap on materialized cylinders.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 23;

/// Default cap on visited cylinders when streaming.
pub const DEFAULT_STREAM_BUDGET: u64 = 1 << 28;

/// Upper estimate `β^{n+1}/(β−1)` for the number of admissible words.
pub fn count_upper_bound(sys: &BetaSystem, n: usize) -> f64 {
    sys.beta().powi(n as i32 + 1) / (sys.beta() - 1.0)
}

/// Lower estimate `β^n` for the number of admissible words.
pub fn count_lower_bound(sys: &BetaSystem, n: usize) -> f64 {
    sys.beta().powi(n as i32)
}

fn check_budget(sys: &BetaSystem, n: usize, budget: u64) -> Result<()> {
    let estimate = count_upper_bound(sys, n);
    if estimate > budget as f64 {
        return Err(Error::Budget { estimate, budget });
    }
    Ok(())
}

/// A left-closed right-open cylinder `[left, left + length)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderInterval {
    pub word: Word,
    pub left: f64,
    pub length: f64,
    /// Image length of `T^n` on the cylinder, `length · β^n`.
    pub tail: f64,
}

impl CylinderInterval {
    pub fn order(&self) -> usize {
        self.word.len()
    }

    pub fn right(&self) -> f64 {
        self.left + self.length
    }

    pub fn is_admissible(&self) -> bool {
        self.length > 0.0
    }

    pub fn is_full(&self) -> bool {
        self.is_admissible() && self.tail >= 1.0 - FULL_TOLERANCE
    }

    pub fn contains(&self, x: f64) -> bool {
        self.left <= x && x < self.right()
    }

    /// `T^n x` computed through the affine branch of the cylinder.
    pub fn local_map(&self, sys: &BetaSystem, x: f64) -> f64 {
        sys.beta().powi(self.order() as i32) * (x - self.left)
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    left: f64,
    tail: f64,
    scale: f64,
}

impl Node {
    const ROOT: Node = Node {
        left: 0.0,
        tail: 1.0,
        scale: 1.0,
    };

    fn child(self, beta: f64, digit: u32) -> Option<Node> {
        let image = beta * self.tail - digit as f64;
        if image <= FULL_TOLERANCE {
            return None;
        }
        let tail = if image >= 1.0 - FULL_TOLERANCE { 1.0 } else { image };
        let scale = self.scale / beta;
        Some(Node {
            left: self.left + digit as f64 * scale,
            tail,
            scale,
        })
    }
}

/// The cylinder of `word`, with length 0 when the word is not admissible.
pub fn cylinder_interval(sys: &BetaSystem, word: &Word) -> Result<CylinderInterval> {
    sys.check_word(word)?;
    let mut node = Node::ROOT;
    for &d in word.digits() {
        match node.child(sys.beta(), d) {
            Some(next) => node = next,
            None => {
                return Ok(CylinderInterval {
                    word: word.clone(),
                    left: sys.evaluate(word),
                    length: 0.0,
                    tail: 0.0,
                })
            }
        }
    }
    Ok(CylinderInterval {
        word: word.clone(),
        left: node.left,
        length: node.tail * node.scale,
        tail: node.tail,
    })
}

/// Whether an admissible word spans a full cylinder, `|I(w)| = β^{-n}`.
pub fn is_full(sys: &BetaSystem, word: &Word) -> Result<bool> {
    let cyl = cylinder_interval(sys, word)?;
    if !cyl.is_admissible() {
        return Err(domain(format!("word {word} is not admissible for base {}", sys.beta())));
    }
    Ok(cyl.is_full())
}

fn walk<F: FnMut(&[u32], Node)>(beta: f64, max_digit: u32, depth: usize, prefix: &mut Vec<u32>, node: Node, visit: &mut F) {
    if prefix.len() == depth {
        visit(prefix, node);
        return;
    }
    for d in 0..=max_digit {
        if let Some(child) = node.child(beta, d) {
            prefix.push(d);
            walk(beta, max_digit, depth, prefix, child, visit);
            prefix.pop();
        } else {
            // Digits are tried in increasing order and βr − d only decreases.
            break;
        }
    }
}

/// Visit every admissible word of order `n` in lexicographic order, which is
/// also left-endpoint order.
pub fn for_each_cylinder<F: FnMut(CylinderInterval)>(sys: &BetaSystem, n: usize, budget: u64, mut visit: F) -> Result<()> {
    if n == 0 {
        return Err(argument("cylinder order must be at least 1"));
    }
    check_budget(sys, n, budget)?;
    let mut prefix = Vec::with_capacity(n);
    walk(sys.beta(), sys.alphabet_max(), n, &mut prefix, Node::ROOT, &mut |w, node| {
        visit(CylinderInterval {
            word: Word(w.to_vec()),
            left: node.left,
            length: node.tail * node.scale,
            tail: node.tail,
        })
    });
    Ok(())
}

/// All of `Σ_β^n` with their intervals, in left-endpoint order.
pub fn enumerate_words(sys: &BetaSystem, n: usize, budget: u64) -> Result<Vec<CylinderInterval>> {
    let mut out = Vec::new();
    for_each_cylinder(sys, n, budget, |c| out.push(c))?;
    Ok(out)
}

/// Full cylinders of order `n`, in left-endpoint order.
pub fn full_cylinders(sys: &BetaSystem, n: usize, budget: u64) -> Result<Vec<CylinderInterval>> {
    let mut out = Vec::new();
    for_each_cylinder(sys, n, budget, |c| {
        if c.is_full() {
            out.push(c)
        }
    })?;
    Ok(out)
}

fn count_subtree(beta: f64, max_digit: u32, node: Node, level: usize, counts: &mut [u64]) {
    counts[level] += 1;
    if level + 1 == counts.len() {
        return;
    }
    for d in 0..=max_digit {
        match node.child(beta, d) {
            Some(child) => count_subtree(beta, max_digit, child, level + 1, counts),
            None => break,
        }
    }
}

/// `#Σ_β^k` for `k = 1..=max_n`, from one traversal sharded by first digit.
pub fn count_words_by_level(sys: &BetaSystem, max_n: usize, budget: u64) -> Result<Vec<u64>> {
    if max_n == 0 {
        return Err(argument("cylinder order must be at least 1"));
    }
    check_budget(sys, max_n, budget)?;
    let beta = sys.beta();
    let max_digit = sys.alphabet_max();
    let shards: Vec<Vec<u64>> = (0..=max_digit)
        .into_par_iter()
        .filter_map(|d| Node::ROOT.child(beta, d))
        .map(|child| {
            let mut counts = vec![0u64; max_n];
            count_subtree(beta, max_digit, child, 0, &mut counts);
            counts
        })
        .collect();
    let mut total = vec![0u64; max_n];
    for shard in shards {
        for (t, c) in total.iter_mut().zip(shard) {
            *t += c;
        }
    }
    Ok(total)
}

/// Result of scanning order-`n` cylinders for full ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacingReport {
    pub beta: f64,
    pub order: usize,
    pub cylinders: u64,
    pub full_cylinders: u64,
    /// Every window of `order + 1` consecutive cylinders holds a full one.
    pub holds: bool,
    /// Largest index difference between consecutive full cylinders.
    pub max_gap: u64,
    /// Longest run of consecutive non-full cylinders, including runs at
    /// either end of the list.
    pub longest_non_full_run: u64,
    pub adjacency: String,
}

/// Sliding-window check that full cylinders occur among every `n + 1`
/// consecutive cylinders of order `n`.
pub fn full_spacing_check(sys: &BetaSystem, n: usize, budget: u64) -> Result<SpacingReport> {
    let mut index = 0u64;
    let mut full = 0u64;
    let mut last_full: Option<u64> = None;
    let mut max_gap = 0u64;
    let mut run = 0u64;
    let mut longest = 0u64;
    for_each_cylinder(sys, n, budget, |c| {
        if c.is_full() {
            if let Some(prev) = last_full {
                max_gap = max_gap.max(index - prev);
            }
            last_full = Some(index);
            full += 1;
            run = 0;
        } else {
            run += 1;
            longest = longest.max(run);
        }
        index += 1;
    })?;
    Ok(SpacingReport {
        beta: sys.beta(),
        order: n,
        cylinders: index,
        full_cylinders: full,
        holds: full > 0 && longest <= n as u64,
        max_gap,
        longest_non_full_run: longest,
        adjacency: "consecutive means adjacent in left-endpoint order".to_string(),
    })
}
