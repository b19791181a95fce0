//! Empirical growth of `s_max(R)`, the largest `|ν|` produced by `push_right`
//! on sampled words of length R.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::push::{push_right, RewriteContext, RewriteTrace};
use crate::error::{Error, Result};
use crate::growth::fit::{fit_exponential_rate, fit_polynomial_degree, ExponentialFit, PolynomialBoundFit};
use crate::spectra::screen::{virtual_nilpotency_screen, ScreenVerdict, DEFAULT_ORDER_BUDGET};
use crate::spectra::default_tolerance;
use crate::words::{Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrefixMode {
    /// Every top generator passed the norm-one screen: s_max should be polynomial.
    Screened,
    Unscreened,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrefixRow {
    pub length: usize,
    pub s_max: f64,
    /// Trace of the word attaining `s_max`.
    pub worst: RewriteTrace,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrefixGrowthReport {
    pub mode: PrefixMode,
    pub seed: u64,
    pub samples: usize,
    pub rows: Vec<PrefixRow>,
    /// Log-log fit over rows with `s_max > 0`.
    pub degree: Option<PolynomialBoundFit>,
    /// Semi-log fit over the same rows.
    pub rate: Option<ExponentialFit>,
}

/// `samples` uniform words of the given length, reproducible from `seed`.
pub fn sample_words(ctx: &RewriteContext, length: usize, samples: usize, seed: u64) -> Vec<Word> {
    let gens = &ctx.gens;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(length as u64);
    (0..samples)
        .map(|_| {
            let letters = (0..length).map(|_| Letter::new(rng.gen_range(0..gens.len()))).collect();
            Word::new(std::sync::Arc::clone(gens), letters).expect("sampled letters are valid")
        })
        .collect()
}

pub fn measure_prefix_growth(
    ctx: &RewriteContext,
    lengths: &[usize],
    samples: usize,
    seed: u64,
) -> Result<PrefixGrowthReport> {
    if samples == 0 || lengths.is_empty() {
        return Err(Error::Parameter("need at least one length and one sample".into()));
    }
    let mode = match virtual_nilpotency_screen(ctx.model(), DEFAULT_ORDER_BUDGET, &default_tolerance()) {
        Ok(r) if r.verdict == ScreenVerdict::Pass => PrefixMode::Screened,
        Ok(_) => PrefixMode::Unscreened,
        // Polycyclic splits carry no screen.
        Err(_) => PrefixMode::Unscreened,
    };
    let mut rows = Vec::with_capacity(lengths.len());
    for &length in lengths {
        let words = sample_words(ctx, length, samples, seed);
        let traces = words
            .par_iter()
            .map(|w| push_right(ctx, w).map(|r| r.trace))
            .collect::<Result<Vec<_>>>()?;
        let worst = traces
            .into_iter()
            .max_by(|a, b| a.s.cmp(&b.s))
            .expect("samples > 0");
        rows.push(PrefixRow {
            length,
            s_max: worst.s.to_f64().unwrap_or(f64::INFINITY),
            worst,
        });
    }
    let series: Vec<(u64, f64)> = rows
        .iter()
        .filter(|r| r.s_max > 0.0 && r.length > 0)
        .map(|r| (r.length as u64, r.s_max))
        .collect();
    let window = match (series.first(), series.last()) {
        (Some(a), Some(b)) => (a.0, b.0),
        _ => (0, 0),
    };
    Ok(PrefixGrowthReport {
        mode,
        seed,
        samples,
        degree: fit_polynomial_degree(&series, window).ok(),
        rate: fit_exponential_rate(&series, window).ok(),
        rows,
    })
}
