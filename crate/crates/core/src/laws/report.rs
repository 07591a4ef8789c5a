use std::io::{self, Write};

use num_complex::Complex64;
use serde::Serialize;

use super::Estimate;
use crate::sde::fmt17;

/// Pass rule `|estimate − target| ≤ stderr_factor · stderr + absolute`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerance {
    pub stderr_factor: f64,
    pub absolute: f64,
}

impl Tolerance {
    pub fn new(stderr_factor: f64, absolute: f64) -> Self {
        Tolerance {
            stderr_factor,
            absolute,
        }
    }

    pub fn allowance(&self, stderr: f64) -> f64 {
        self.stderr_factor * stderr + self.absolute
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportEntry {
    pub polynomial: String,
    /// Variable index the entry refers to, when it has one.
    pub index: Option<usize>,
    pub estimate_re: f64,
    pub estimate_im: f64,
    pub stderr: f64,
    pub target: Option<f64>,
    /// Upper bound checked instead of a target.
    pub bound: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub tolerance: Tolerance,
    pub entries: Vec<ReportEntry>,
}

impl MomentReport {
    pub fn new(tolerance: Tolerance) -> Self {
        MomentReport {
            tolerance,
            entries: Vec::new(),
        }
    }

    pub fn push_target(&mut self, polynomial: String, index: Option<usize>, est: Estimate, target: Complex64) {
        let pass = (est.value - target).norm() <= self.tolerance.allowance(est.stderr);
        self.entries.push(ReportEntry {
            polynomial,
            index,
            estimate_re: est.value.re,
            estimate_im: est.value.im,
            stderr: est.stderr,
            target: Some(target.re),
            bound: None,
            pass,
        });
    }

    /// `signed`: compare the real part, else the modulus, against `bound`.
    pub fn push_bound(&mut self, polynomial: String, index: Option<usize>, est: Estimate, bound: f64, signed: bool) {
        let lhs = if signed { est.value.re } else { est.value.norm() };
        let pass = lhs <= bound + self.tolerance.allowance(est.stderr);
        self.entries.push(ReportEntry {
            polynomial,
            index,
            estimate_re: est.value.re,
            estimate_im: est.value.im,
            stderr: est.stderr,
            target: None,
            bound: Some(bound),
            pass,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    pub fn max_abs_deviation(&self) -> f64 {
        self.entries
            .iter()
            .filter_map(|e| e.target.map(|t| Complex64::new(e.estimate_re - t, e.estimate_im).norm()))
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "polynomial,index,estimate_re,estimate_im,stderr,target,bound,pass")?;
        let opt = |x: Option<f64>| x.map(fmt17).unwrap_or_default();
        for e in &self.entries {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                e.polynomial,
                e.index.map(|i| i.to_string()).unwrap_or_default(),
                fmt17(e.estimate_re),
                fmt17(e.estimate_im),
                fmt17(e.stderr),
                opt(e.target),
                opt(e.bound),
                e.pass
            )?;
        }
        Ok(())
    }
}
