use crate::error::{Error, Result};
use crate::info::{entropy_of, JointDist};
use crate::var::Var;

struct Projection {
    /// Positions within the checked sequences.
    members: Vec<usize>,
    strides: Vec<usize>,
    /// `-log2 p` of each cell, infinite on zeros.
    surprisal: Vec<f64>,
    entropy: f64,
}

/// Joint ε-typicality over every projection of a fixed variable tuple.
///
/// A tuple of sequences is typical when, for every nonempty subset of the
/// variables, the empirical `-(1/n) log2 p` of the projected sequence is
/// within `epsilon` of the entropy of that subset. Any symbol of zero
/// probability makes the tuple atypical.
pub struct TypicalityChecker {
    vars: Vec<Var>,
    projections: Vec<Projection>,
    epsilon: f64,
}

impl TypicalityChecker {
    pub fn new(dist: &JointDist, vars: &[Var], epsilon: f64) -> Result<Self> {
        if vars.is_empty() || vars.len() > 16 {
            return Err(Error::InvalidConfig(format!("cannot check typicality over {} variables", vars.len())));
        }
        let mut projections = Vec::with_capacity((1 << vars.len()) - 1);
        for mask in 1usize..(1 << vars.len()) {
            let members: Vec<usize> = (0..vars.len()).filter(|i| mask >> i & 1 == 1).collect();
            let sub: Vec<Var> = members.iter().map(|&i| vars[i]).collect();
            let pmf = dist.marginal_pmf(&sub)?;
            let sizes: Vec<usize> = sub.iter().map(|&v| dist.size_of(v).unwrap_or(1)).collect();
            let mut strides = vec![1; sizes.len()];
            for k in (0..sizes.len().saturating_sub(1)).rev() {
                strides[k] = strides[k + 1] * sizes[k + 1];
            }
            projections.push(Projection {
                members,
                strides,
                entropy: entropy_of(&pmf),
                surprisal: pmf.iter().map(|&p| if p > 0.0 { -p.log2() } else { f64::INFINITY }).collect(),
            });
        }
        Ok(TypicalityChecker {
            vars: vars.to_vec(),
            projections,
            epsilon,
        })
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    /// `seqs[i]` is the sequence of `vars()[i]`; all must share one length.
    pub fn check(&self, seqs: &[&[usize]]) -> bool {
        let n = seqs.first().map_or(0, |s| s.len());
        if n == 0 || seqs.len() != self.vars.len() || seqs.iter().any(|s| s.len() != n) {
            return false;
        }
        let inv_n = 1.0 / n as f64;
        self.projections.iter().all(|p| {
            let mut total = 0.0;
            for k in 0..n {
                let idx: usize = p.members.iter().zip(&p.strides).map(|(&m, &st)| seqs[m][k] * st).sum();
                total += p.surprisal[idx];
            }
            total.is_finite() && (total * inv_n - p.entropy).abs() <= self.epsilon
        })
    }
}

/// One-shot typicality test of `seqs` under `dist`.
pub fn typical_set_test(seqs: &[(Var, &[usize])], dist: &JointDist, epsilon: f64) -> Result<bool> {
    let vars: Vec<Var> = seqs.iter().map(|(v, _)| *v).collect();
    for (v, s) in seqs {
        let size = dist.size_of(*v).ok_or_else(|| Error::MissingVariable(v.to_string()))?;
        if s.iter().any(|&a| a >= size) {
            return Err(Error::DimensionMismatch(format!("symbol of {v} outside its alphabet of size {size}")));
        }
    }
    if seqs.windows(2).any(|w| w[0].1.len() != w[1].1.len()) {
        return Err(Error::DimensionMismatch("sequences differ in length".into()));
    }
    let checker = TypicalityChecker::new(dist, &vars, epsilon)?;
    let slices: Vec<&[usize]> = seqs.iter().map(|(_, s)| *s).collect();
    Ok(checker.check(&slices))
}
