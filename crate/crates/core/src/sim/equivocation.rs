use crate::error::{Error, Result};
use crate::info::{build_joint, entropy_of, mutual_info};
use crate::sim::{Codebook, SetSizes, SimConfig};
use crate::var::Var::{S, U, X, Z};

/// Default cap on `|Z|^n · |W||T||J||L|`.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// Exact `(1/n) H(L|Z^n)` of one block of `book`, in bits per symbol.
///
/// `T`, `J`, `L` are uniform and `W = φ(T̃)` for an independent uniform `T̃`.
/// The relay observes `z^n` through `Γ(z|x,s)` of the configured channel.
pub fn equivocation_exact(cfg: &SimConfig, book: &Codebook) -> Result<f64> {
    let SetSizes { t: nt, l: nl, j: nj, w: nw } = book.sizes;
    let n = book.n;
    let nz = cfg.channel.nz();
    let zn = (nz as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    let needed = zn.saturating_mul((nw * nt * nj * nl) as u128);
    if needed > cfg.enumeration_cap {
        return Err(Error::EnumerationCapExceeded {
            needed,
            cap: cfg.enumeration_cap,
        });
    }
    let zn = zn as usize;
    let z_given_xs = cfg.channel.z_given_xs();
    let ns = cfg.channel.ns();

    let mut p_w = vec![0.0; nw];
    for t in 0..nt {
        p_w[book.phi(t)] += 1.0 / nt as f64;
    }

    let mut p_lz = vec![0.0; nl * zn];
    let mut pz = Vec::with_capacity(zn);
    let mut next = Vec::with_capacity(zn);
    for (w, &pw) in p_w.iter().enumerate() {
        if pw == 0.0 {
            continue;
        }
        let weight = pw / (nt * nj * nl) as f64;
        let s = book.s(w);
        for t in 0..nt {
            for j in 0..nj {
                for l in 0..nl {
                    let x = book.x(w, t, j, l);
                    pz.clear();
                    pz.push(weight);
                    for k in 0..n {
                        let row = &z_given_xs[(x[k] * ns + s[k]) * nz..][..nz];
                        next.clear();
                        for &v in &pz {
                            next.extend(row.iter().map(|&q| v * q));
                        }
                        std::mem::swap(&mut pz, &mut next);
                    }
                    for (acc, v) in p_lz[l * zn..(l + 1) * zn].iter_mut().zip(&pz) {
                        *acc += v;
                    }
                }
            }
        }
    }
    let mut p_z = vec![0.0; zn];
    for block in p_lz.chunks(zn) {
        for (acc, v) in p_z.iter_mut().zip(block) {
            *acc += v;
        }
    }
    let h = (entropy_of(&p_lz) - entropy_of(&p_z)) / n as f64;
    let max = (nl as f64).log2() / n as f64;
    Ok(h.clamp(0.0, max))
}

/// The finite-`n` lower bound on `(1/n) H(L|Z^n)`:
///
/// `r2 + r1 − I(X;Z|US) − 4ε − 3/n − κ·e2a − (r2 + H(Z|XS))·e2b`,
/// with `r1 = log2|L|/n`, `r2 = log2|J|/n` and
/// `κ = max −log2 p(z|u,s)` over positive conditionals.
pub fn plugin_lower_bound(cfg: &SimConfig, sizes: &SetSizes, e2a: f64, e2b: f64) -> Result<f64> {
    let joint = build_joint(&cfg.aux, &cfg.channel)?;
    let n = cfg.n as f64;
    let r1 = (sizes.l as f64).log2() / n;
    let r2 = (sizes.j as f64).log2() / n;
    let i_xz = mutual_info(&joint, &[X], &[Z], &[U, S])?;
    let h_z_xs = joint.cond_entropy(&[Z], &[X, S])?;
    let p_usz = joint.marginal_pmf(&[U, S, Z])?;
    let nz = cfg.channel.nz();
    let kappa = p_usz
        .chunks(nz)
        .flat_map(|row| {
            let total: f64 = row.iter().sum();
            row.iter().filter(move |&&p| p > 0.0).map(move |&p| -(p / total).log2())
        })
        .fold(0.0, f64::max);
    Ok(r2 + r1 - i_xz - 4.0 * cfg.epsilon - 3.0 / n - kappa * e2a - (r2 + h_z_xs) * e2b)
}
