//! Wall-clock deadlines; without the `std` feature only node limits apply.

#[cfg(feature = "std")]
pub(crate) struct Deadline(Option<std::time::Instant>);

#[cfg(feature = "std")]
impl Deadline {
    pub fn after(secs: Option<f64>) -> Self {
        Deadline(secs.map(|s| std::time::Instant::now() + std::time::Duration::from_secs_f64(s.max(0.0))))
    }

    #[inline]
    pub fn expired(&self) -> bool {
        self.0.is_some_and(|d| std::time::Instant::now() >= d)
    }
}

#[cfg(not(feature = "std"))]
pub(crate) struct Deadline;

#[cfg(not(feature = "std"))]
impl Deadline {
    pub fn after(_secs: Option<f64>) -> Self {
        Deadline
    }

    #[inline]
    pub fn expired(&self) -> bool {
        false
    }
}

/// Measures elapsed seconds; always zero without the `std` feature.
pub struct Stopwatch {
    #[cfg(feature = "std")]
    start: std::time::Instant,
}

impl Stopwatch {
    pub fn start() -> Self {
        Stopwatch {
            #[cfg(feature = "std")]
            start: std::time::Instant::now(),
        }
    }

    pub fn seconds(&self) -> f64 {
        #[cfg(feature = "std")]
        {
            self.start.elapsed().as_secs_f64()
        }
        #[cfg(not(feature = "std"))]
        {
            0.0
        }
    }
}
