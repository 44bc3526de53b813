//! Grid scans: every odd prime up to a bound against every shift in a
//! range. Points are verified independently (optionally in parallel)
//! and always reported in (p, d) order.

use quadcong::{is_odd_prime, verify_point, Method, VerificationRecord, VerifyError};
use rayon::prelude::*;

use crate::emit;
use crate::Format;

pub struct ScanConfig {
    pub p_max: u64,
    pub d_range: (i64, i64),
    pub k: u32,
    pub method: Method,
    pub jobs: usize,
    pub format: Format,
}

/// Runs the scan, emits records to stdout, and returns whether every
/// point passed. Points with `p | d` are not ring parameters at all;
/// they are skipped and logged to stderr.
pub fn run_scan(cfg: &ScanConfig) -> Result<bool, VerifyError> {
    let (d_min, d_max) = cfg.d_range;
    let mut points = Vec::new();
    for p in 3..=cfg.p_max.max(2) {
        if !is_odd_prime(p) {
            continue;
        }
        for d in d_min..=d_max {
            if d.rem_euclid(p as i64) == 0 {
                eprintln!("skip p = {p}, d = {d}: p divides d");
            } else {
                points.push((p, d));
            }
        }
    }

    let verify = |&(p, d): &(u64, i64)| verify_point(p, d, cfg.method, cfg.k);
    let collected: Result<Vec<VerificationRecord>, VerifyError> = if cfg.jobs > 1 {
        match rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
        {
            Ok(pool) => pool.install(|| points.par_iter().map(verify).collect()),
            Err(e) => {
                eprintln!("thread pool unavailable ({e}), scanning serially");
                points.iter().map(verify).collect()
            }
        }
    } else {
        points.iter().map(verify).collect()
    };
    let mut records = collected?;
    records.sort_by_key(|r| (r.p, r.d));

    emit::emit_records(&records, cfg.format);

    let failed = records.iter().filter(|r| !r.passes()).count();
    for r in records.iter().filter(|r| !r.passes()) {
        eprintln!("check failed at p = {}, d = {}", r.p, r.d);
    }
    if cfg.format == Format::Human {
        println!("scanned {} points, {} failed", records.len(), failed);
    }
    Ok(failed == 0)
}
