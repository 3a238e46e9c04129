//! Bundle-value reports.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Bundle, Error, Result};

/// A single reported value `(x, v̂(x))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleValueReport {
    pub bundle: Bundle,
    pub value: f64,
}

impl BundleValueReport {
    pub fn new(bundle: Bundle, value: f64) -> Self {
        BundleValueReport { bundle, value }
    }
}

/// The reports `R_i` collected from one bidder, in arrival order.
///
/// The empty bundle is implicitly reported with value zero and may not be
/// reported explicitly. Reports are append-only and bundles are distinct.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<BundleValueReport>", into = "Vec<BundleValueReport>")]
pub struct ReportSet {
    reports: Vec<BundleValueReport>,
    index: BTreeMap<u64, usize>,
}

impl ReportSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_reports<I: IntoIterator<Item = BundleValueReport>>(reports: I) -> Result<Self> {
        let mut set = ReportSet::new();
        for r in reports {
            set.push(r)?;
        }
        Ok(set)
    }

    pub fn push(&mut self, report: BundleValueReport) -> Result<()> {
        if !report.value.is_finite() || report.value < 0.0 {
            return Err(Error::InvalidValue(report.value));
        }
        if let Some(first) = self.reports.first() {
            if first.bundle.width() != report.bundle.width() {
                return Err(Error::DimensionMismatch {
                    expected: first.bundle.width(),
                    found: report.bundle.width(),
                });
            }
        }
        if report.bundle.is_empty() || self.index.contains_key(&report.bundle.bits()) {
            return Err(Error::DuplicateReport(report.bundle.to_string()));
        }
        self.index.insert(report.bundle.bits(), self.reports.len());
        self.reports.push(report);
        Ok(())
    }

    pub fn insert(&mut self, bundle: Bundle, value: f64) -> Result<()> {
        self.push(BundleValueReport { bundle, value })
    }

    /// Reported value; the empty bundle always yields `Some(0.0)`.
    pub fn get(&self, bundle: &Bundle) -> Option<f64> {
        if bundle.is_empty() {
            return Some(0.0);
        }
        self.index.get(&bundle.bits()).map(|&k| self.reports[k].value)
    }

    /// Whether the bundle has been reported (always true for the empty bundle).
    pub fn contains(&self, bundle: &Bundle) -> bool {
        bundle.is_empty() || self.index.contains_key(&bundle.bits())
    }

    /// Number of explicit reports.
    pub fn len(&self) -> usize {
        self.reports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reports.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, BundleValueReport> {
        self.reports.iter()
    }

    pub fn reports(&self) -> &[BundleValueReport] {
        &self.reports
    }

    pub fn bundles(&self) -> impl Iterator<Item = Bundle> + '_ {
        self.reports.iter().map(|r| r.bundle)
    }
}

impl TryFrom<Vec<BundleValueReport>> for ReportSet {
    type Error = Error;
    fn try_from(v: Vec<BundleValueReport>) -> Result<Self> {
        ReportSet::from_reports(v)
    }
}

impl From<ReportSet> for Vec<BundleValueReport> {
    fn from(r: ReportSet) -> Self {
        r.reports
    }
}

impl<'a> IntoIterator for &'a ReportSet {
    type Item = &'a BundleValueReport;
    type IntoIter = core::slice::Iter<'a, BundleValueReport>;
    fn into_iter(self) -> Self::IntoIter {
        self.reports.iter()
    }
}
