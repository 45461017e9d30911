//! Uniform entry point over the three low-rank methods.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::block_svd::{check_alpha, target_rank};
use crate::error::{Error, Result};
use crate::pipeline::{fastpi, FastPiConfig, Stage, StageTimings};
use crate::pinv::{pinv_from_svd, Pseudoinverse, DEFAULT_CUTOFF_FACTOR};
use crate::sparse::SparseMatrix;
use crate::svd::{dense_svd, randomized_svd, truncate_unchecked, SvdFactors};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    FastPi,
    RandPi,
    Dense,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::FastPi, Method::RandPi, Method::Dense];

    pub fn name(self) -> &'static str {
        match self {
            Method::FastPi => "fastpi",
            Method::RandPi => "randpi",
            Method::Dense => "dense",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fastpi" => Ok(Method::FastPi),
            "randpi" => Ok(Method::RandPi),
            "dense" => Ok(Method::Dense),
            other => Err(Error::domain(format!(
                "unknown method '{other}' (expected fastpi, randpi or dense)"
            ))),
        }
    }
}

/// A low-rank SVD and pseudoinverse, both in original coordinates.
#[derive(Clone, Debug)]
pub struct MethodRun {
    pub method: Method,
    pub svd: SvdFactors,
    pub pinv: Pseudoinverse,
    pub timings: StageTimings,
}

/// Runs `method` at rank ratio `alpha`; the rank is `ceil(alpha · min(m, n))`.
/// `k` is only used by FastPI.
pub fn run_method(
    method: Method,
    a: &SparseMatrix,
    alpha: f64,
    k: f64,
    seed: u64,
) -> Result<MethodRun> {
    check_alpha(alpha)?;
    if method == Method::FastPi {
        let out = fastpi(a, &FastPiConfig::new(alpha).with_k(k).with_seed(seed))?;
        return Ok(MethodRun {
            method,
            svd: out.svd,
            pinv: out.pinv,
            timings: out.timings,
        });
    }
    let r = target_rank(alpha, a.n_rows().min(a.n_cols()));
    if r == 0 {
        return Err(Error::domain("cannot factor an empty matrix"));
    }
    let mut timings = StageTimings::default();
    let start = Instant::now();
    let svd = match method {
        Method::RandPi => randomized_svd(a, r, seed)?,
        _ => truncate_unchecked(&dense_svd(&a.to_dense()?)?, r),
    };
    timings.push(Stage::Svd, start, svd.rank());
    let start = Instant::now();
    let pinv = pinv_from_svd(&svd, DEFAULT_CUTOFF_FACTOR)?;
    timings.push(Stage::PinvAssembly, start, pinv.rank());
    Ok(MethodRun {
        method,
        svd,
        pinv,
        timings,
    })
}
