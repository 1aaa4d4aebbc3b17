use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{stream_rng, SimConfig};

/// Message set sizes `|T|, |L|, |J|, |W|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSizes {
    pub t: usize,
    pub l: usize,
    pub j: usize,
    pub w: usize,
}

impl SetSizes {
    /// Number of stored symbols in a codebook of length `n`.
    pub fn stored_symbols(&self, n: usize) -> u128 {
        let (t, l, j, w) = (self.t as u128, self.l as u128, self.j as u128, self.w as u128);
        n as u128 * (w + w * t + w * t * j * l + t)
    }
}

/// Random code: relay words `s(w)`, cloud centres `u(w,t)`, satellites
/// `x(w,t,j,l)`, and the partition `φ: T → W`.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub n: usize,
    pub sizes: SetSizes,
    s_words: Vec<usize>,
    u_words: Vec<usize>,
    x_words: Vec<usize>,
    partition: Vec<usize>,
    bins: Vec<Vec<usize>>,
}

impl Codebook {
    pub fn s(&self, w: usize) -> &[usize] {
        &self.s_words[w * self.n..(w + 1) * self.n]
    }

    pub fn u(&self, w: usize, t: usize) -> &[usize] {
        let i = w * self.sizes.t + t;
        &self.u_words[i * self.n..(i + 1) * self.n]
    }

    pub fn x(&self, w: usize, t: usize, j: usize, l: usize) -> &[usize] {
        let SetSizes { t: nt, j: nj, l: nl, .. } = self.sizes;
        let i = ((w * nt + t) * nj + j) * nl + l;
        &self.x_words[i * self.n..(i + 1) * self.n]
    }

    /// `φ(t)`.
    pub fn phi(&self, t: usize) -> usize {
        self.partition[t]
    }

    /// `T(w) = {t : φ(t) = w}` in increasing order.
    pub fn bin(&self, w: usize) -> &[usize] {
        &self.bins[w]
    }

    pub fn partition(&self) -> &[usize] {
        &self.partition
    }
}

fn sampler(weights: &[f64]) -> Option<WeightedIndex<f64>> {
    WeightedIndex::new(weights).ok()
}

/// Draws the codebook of `cfg` from stream 0 of its seed.
pub fn generate_codebook(cfg: &SimConfig) -> Result<Codebook> {
    let sizes = cfg.set_sizes()?;
    let needed = sizes.stored_symbols(cfg.n);
    if needed > cfg.memory_cap {
        return Err(Error::MemoryCapExceeded {
            needed,
            cap: cfg.memory_cap,
        });
    }
    let aux = &cfg.aux;
    let (nu, ns, nx, n) = (aux.nu(), aux.ns(), aux.nx(), cfg.n);
    let p_s = aux.p_s();
    let s_dist = sampler(&p_s).ok_or_else(|| Error::InternalConsistency("p_S has no mass".into()))?;
    let u_given_s: Vec<Option<WeightedIndex<f64>>> = (0..ns)
        .map(|s| sampler(&(0..nu).map(|u| aux.p_us(u, s)).collect::<Vec<_>>()))
        .collect();
    let x_given_us: Vec<Option<WeightedIndex<f64>>> = (0..nu * ns)
        .map(|i| sampler(&(0..nx).map(|x| aux.p_x_given_us(i / ns, i % ns, x)).collect::<Vec<_>>()))
        .collect();

    let mut rng = stream_rng(cfg.seed, 0);
    let draw = |d: &Option<WeightedIndex<f64>>, rng: &mut rand_chacha::ChaCha8Rng| d.as_ref().map_or(0, |d| d.sample(rng));

    let mut s_words = Vec::with_capacity(sizes.w * n);
    for _ in 0..sizes.w * n {
        s_words.push(s_dist.sample(&mut rng));
    }
    let mut u_words = Vec::with_capacity(sizes.w * sizes.t * n);
    for w in 0..sizes.w {
        for _ in 0..sizes.t {
            for k in 0..n {
                u_words.push(draw(&u_given_s[s_words[w * n + k]], &mut rng));
            }
        }
    }
    let per_u = sizes.j * sizes.l;
    let mut x_words = Vec::with_capacity(sizes.w * sizes.t * per_u * n);
    for w in 0..sizes.w {
        for t in 0..sizes.t {
            let ui = (w * sizes.t + t) * n;
            for _ in 0..per_u {
                for k in 0..n {
                    let (u, s) = (u_words[ui + k], s_words[w * n + k]);
                    x_words.push(draw(&x_given_us[u * ns + s], &mut rng));
                }
            }
        }
    }
    let partition: Vec<usize> = (0..sizes.t).map(|_| rng.random_range(0..sizes.w)).collect();
    let mut bins = vec![Vec::new(); sizes.w];
    for (t, &w) in partition.iter().enumerate() {
        bins[w].push(t);
    }
    Ok(Codebook {
        n,
        sizes,
        s_words,
        u_words,
        x_words,
        partition,
        bins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::RelayChannelDMC;
    use crate::info::AuxInput;
    use crate::sim::Rates;

    fn cfg(rates: Rates, aux: AuxInput, n: usize) -> SimConfig {
        let ch = RelayChannelDMC::from_fn(2, 2, 2, 2, |x, s, y, z| if y == x ^ s && z == x { 1.0 } else { 0.0 }).unwrap();
        SimConfig::new(n, 2, rates, 0.1, 5, aux, ch).unwrap()
    }

    fn aux_uniform() -> AuxInput {
        AuxInput::new(vec![vec![0.25, 0.25], vec![0.25, 0.25]], vec![vec![vec![0.5, 0.5]; 2]; 2]).unwrap()
    }

    #[test]
    fn single_codeword_shapes() {
        let book = generate_codebook(&cfg(Rates::default(), aux_uniform(), 4)).unwrap();
        assert_eq!(book.sizes, SetSizes { t: 1, l: 1, j: 1, w: 1 });
        assert_eq!(book.x(0, 0, 0, 0).len(), 4);
        assert_eq!(book.bin(0), &[0]);
    }

    #[test]
    fn point_mass_input_gives_equal_words() {
        let aux = AuxInput::new(vec![vec![0.5, 0.5]], vec![vec![vec![0.0, 1.0]; 2]]).unwrap();
        let rates = Rates { r0: 0.5, r1: 0.5, r2: 0.5, r: 0.25 };
        let book = generate_codebook(&cfg(rates, aux, 4)).unwrap();
        assert_eq!(book.sizes, SetSizes { t: 4, l: 4, j: 4, w: 2 });
        for w in 0..2 {
            for t in 0..4 {
                for j in 0..4 {
                    for l in 0..4 {
                        assert_eq!(book.x(w, t, j, l), &[1, 1, 1, 1]);
                    }
                }
            }
        }
        assert!(book.partition().iter().all(|&w| w < 2));
    }

    #[test]
    fn relay_word_frequencies() {
        // p_S = (0.7, 0.3); 10^4 symbols of s-words.
        let aux = AuxInput::new(vec![vec![0.7, 0.3]], vec![vec![vec![0.5, 0.5]; 2]]).unwrap();
        let rates = Rates { r0: 0.0, r1: 0.0, r2: 0.0, r: 0.46 };
        let book = generate_codebook(&cfg(rates, aux, 20)).unwrap();
        assert_eq!(book.sizes.w, 512);
        let total = 512 * 20;
        let ones: usize = (0..512).map(|w| book.s(w).iter().sum::<usize>()).sum();
        let sigma = (total as f64 * 0.3 * 0.7).sqrt();
        assert!((ones as f64 - 0.3 * total as f64).abs() < 3.0 * sigma);
    }

    #[test]
    fn memory_cap() {
        let mut c = cfg(Rates { r0: 1.0, r1: 1.0, r2: 1.0, r: 1.0 }, aux_uniform(), 12);
        c.memory_cap = 1000;
        assert_eq!(generate_codebook(&c).unwrap_err().name(), "MemoryCapExceeded");
    }

    #[test]
    fn deterministic_given_seed() {
        let rates = Rates { r0: 0.5, r1: 0.25, r2: 0.25, r: 0.25 };
        let a = generate_codebook(&cfg(rates, aux_uniform(), 8)).unwrap();
        let b = generate_codebook(&cfg(rates, aux_uniform(), 8)).unwrap();
        assert_eq!(a, b);
    }
}
