//! Observables for equilibrium runs: degree histograms and cumulative
//! distributions, least-squares fits in log-log and log-linear coordinates,
//! the curvature statistic, neighbor-degree correlation, windowed rejection
//! tracking and CSV emission.

mod csv;
mod curvature;
mod fit;
mod histogram;
mod neighbor;
mod observers;

pub use csv::{write_fits_csv, write_histogram_csv, write_timeseries_csv};
pub use curvature::{curvature_delta, forman_curvature_sum, CurvatureTracker};
pub use fit::{default_fit_window, fit_loglinear, fit_loglog, FitError, FitModel, FitResult};
pub use histogram::{CumulativeDistribution, DegreeAccumulator, DegreeHistogram};
pub use neighbor::{neighbor_degree_stats, NeighborDegreeStats};
pub use observers::{DegreeSampler, RejectionTracker, TimePoint, TimeSeries};
