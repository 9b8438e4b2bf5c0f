use fixedbitset::FixedBitSet;

use crate::error::Result;
use crate::graph::Topology;
use crate::paths::PathSet;

use super::{check_k, IntBounds, Omega, Rule, TriState};

/// Size of the greedy cover of `P_v` by the path sets of other non-monitors.
/// Each step takes the node covering the most uncovered paths, ties going to
/// the smallest index. Nodes on no path report 0; nodes with a direct path
/// report σ.
pub fn greedy_set_cover(t: &Topology, v: usize, paths: &PathSet) -> Result<usize> {
    t.require_non_monitor(v)?;
    let target = paths.through(v);
    if target.is_clear() {
        return Ok(0);
    }
    if paths.has_direct_path(v) {
        return Ok(t.sigma());
    }
    let mut uncovered: FixedBitSet = target.clone();
    let mut steps = 0;
    while !uncovered.is_clear() {
        let (_, best) = t
            .non_monitors()
            .iter()
            .filter(|&&w| w != v)
            .map(|&w| (paths.through(w).intersection(&uncovered).count(), w))
            .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
            .expect("another non-monitor exists");
        uncovered.difference_with(paths.through(best));
        steps += 1;
    }
    Ok(steps)
}

/// Bounds implied by a known minimum cover size, for nodes without a direct
/// path and on at least one path.
pub fn omega_from_cover(cover: usize) -> IntBounds {
    IntBounds::new(cover.saturating_sub(1), cover)
}

fn greedy_bounds(greedy: usize, path_count: usize) -> IntBounds {
    // The greedy cover exceeds the optimum by at most a factor ln|P_v| + 1.
    let ratio = greedy as f64 / ((path_count as f64).ln() + 1.0);
    let min_cover = (ratio - 1e-9).ceil().max(1.0) as usize;
    IntBounds::new(min_cover.saturating_sub(1), greedy)
}

/// Bounds on Ω of `v` under fixed routing over `paths`.
pub fn omega_up(t: &Topology, v: usize, paths: &PathSet) -> Result<Omega> {
    t.require_non_monitor(v)?;
    let count = paths.through(v).count_ones(..);
    if count == 0 {
        return Ok(Omega::new(IntBounds::exact(0), Rule::Unmonitored));
    }
    if paths.has_direct_path(v) {
        return Ok(Omega::new(IntBounds::exact(t.sigma()), Rule::DirectPath));
    }
    let greedy = greedy_set_cover(t, v, paths)?;
    Ok(Omega::new(greedy_bounds(greedy, count), Rule::CoverGap))
}

/// Nodes with a direct path, the maximal σ-identifiable set.
pub fn direct_path_set(t: &Topology, paths: &PathSet) -> Vec<usize> {
    t.non_monitors()
        .iter()
        .copied()
        .filter(|&v| paths.has_direct_path(v))
        .collect()
}

pub(crate) fn k_identifiable_from(
    t: &Topology,
    set: &[usize],
    k: usize,
    paths: &PathSet,
    bounds: &[IntBounds],
) -> TriState {
    if k == t.sigma() {
        return TriState::from_bool(
            set.iter().all(|&v| paths.has_direct_path(v)),
            Rule::DirectPath,
        );
    }
    let lo = bounds.iter().map(|b| b.lo).min().expect("non-empty");
    let hi = bounds.iter().map(|b| b.hi).min().expect("non-empty");
    if lo >= k {
        TriState::Identifiable(Rule::CoverSufficient)
    } else if hi < k {
        TriState::NotIdentifiable(Rule::CoverNecessary)
    } else {
        TriState::Undetermined(Rule::CoverGap)
    }
}

/// Decides k-identifiability of `set` under fixed routing over `paths`.
pub fn k_identifiable_up(t: &Topology, set: &[usize], k: usize, paths: &PathSet) -> Result<TriState> {
    t.require_non_monitor_set(set)?;
    check_k(k, t.sigma())?;
    let bounds = set
        .iter()
        .map(|&v| omega_up(t, v, paths).map(|o| o.bounds))
        .collect::<Result<Vec<_>>>()?;
    Ok(k_identifiable_from(t, set, k, paths, &bounds))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# monitors: m1 m2 m3
m1 v1
m1 v2
m2 v1
m2 v3
m2 v4
m3 v3
m3 v4
v1 v2
v2 v3
v2 v4
";

    fn setup() -> (Topology, PathSet) {
        let t = Topology::load(SAMPLE, None).unwrap();
        let ps = PathSet::parse(&t, "m1 v1 m2\nm2 v4 m3\nm1 v2 v4 m3\n").unwrap();
        (t, ps)
    }

    #[test]
    fn sample_node_bounds() {
        let (t, ps) = setup();
        let id = |n: &str| t.index_of(n).unwrap();
        assert_eq!(omega_up(&t, id("v1"), &ps).unwrap().bounds, IntBounds::exact(4));
        assert_eq!(omega_up(&t, id("v4"), &ps).unwrap().bounds, IntBounds::exact(4));
        assert_eq!(omega_up(&t, id("v3"), &ps).unwrap().bounds, IntBounds::exact(0));
        assert_eq!(greedy_set_cover(&t, id("v2"), &ps).unwrap(), 1);
        assert_eq!(omega_up(&t, id("v2"), &ps).unwrap().bounds, IntBounds::new(0, 1));
        assert_eq!(direct_path_set(&t, &ps), [id("v1"), id("v4")]);
    }

    #[test]
    fn sample_set_queries() {
        let (t, ps) = setup();
        let s = t.non_monitor_set(&["v1", "v2", "v4"]).unwrap();
        assert_eq!(
            k_identifiable_up(&t, &s, 4, &ps).unwrap(),
            TriState::NotIdentifiable(Rule::DirectPath)
        );
        assert_eq!(
            k_identifiable_up(&t, &s, 2, &ps).unwrap(),
            TriState::NotIdentifiable(Rule::CoverNecessary)
        );
        assert_eq!(
            k_identifiable_up(&t, &s, 1, &ps).unwrap(),
            TriState::Undetermined(Rule::CoverGap)
        );
    }

    #[test]
    fn greedy_ratio_bound() {
        assert_eq!(greedy_bounds(1, 1), IntBounds::new(0, 1));
        assert_eq!(greedy_bounds(3, 1), IntBounds::new(2, 3));
        // 4 / (ln 5 + 1) = 1.53..
        assert_eq!(greedy_bounds(4, 5), IntBounds::new(1, 4));
    }
}
