//! Shared workloads for the benchmarks.

use clocklat::generators::grid;
use clocklat::BalancedGraph;

/// Odd grid sizes used across the benchmark groups.
pub const GRIDS: &[(usize, usize)] = &[(1, 1), (3, 3), (3, 5), (5, 5)];

pub fn grid_workloads() -> Vec<((usize, usize), BalancedGraph)> {
    GRIDS.iter().map(|&(m, n)| ((m, n), grid(m, n).expect("odd dimensions"))).collect()
}
