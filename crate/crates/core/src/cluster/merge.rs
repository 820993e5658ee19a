use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{VertexSet, WeightedGraph};

/// How safe sets are joined once their mutual conductance clears the threshold.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MergeRule {
    /// Union-find over the original pairs whose mutual conductance exceeds the
    /// threshold.
    SingleLinkage,
    /// Repeatedly join the two current sets with the highest mutual
    /// conductance, recomputed after every join, while it exceeds the threshold.
    #[default]
    Agglomerative,
}

impl std::str::FromStr for MergeRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "single-linkage" => Ok(MergeRule::SingleLinkage),
            "agglomerative" => Ok(MergeRule::Agglomerative),
            other => Err(format!(
                "unknown merge rule `{other}` (expected single-linkage or agglomerative)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergeOutcome {
    /// Merged sets ordered by smallest member.
    pub sets: Vec<VertexSet>,
    /// Number of pairwise joins performed.
    pub merges: usize,
    /// For every output set, the indices of the input sets it absorbed.
    pub members: Vec<Vec<usize>>,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    /// Union keeping the smaller root; returns whether the roots differed.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.0[hi] = lo;
        true
    }
}

fn collect(sets: &[VertexSet], dsu: &mut Dsu) -> (Vec<VertexSet>, Vec<Vec<usize>>) {
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..sets.len() {
        groups.entry(dsu.find(i)).or_default().push(i);
    }
    let mut out: Vec<(VertexSet, Vec<usize>)> = groups
        .into_values()
        .map(|members| {
            (
                VertexSet::new(members.iter().flat_map(|&i| sets[i].iter())),
                members,
            )
        })
        .collect();
    out.sort_by_key(|(s, _)| s.as_slice().first().copied());
    out.into_iter().unzip()
}

/// Merge sets whose mutual conductance `w(A,B)/min(vol A, vol B)` exceeds
/// `threshold`. Empty inputs are dropped and overlapping inputs are joined
/// first without counting as merges.
pub fn merge_safe_sets(
    g: &WeightedGraph,
    sets: &[VertexSet],
    threshold: f64,
    rule: MergeRule,
) -> Result<MergeOutcome> {
    for s in sets {
        g.check_set(s)?;
    }
    let sets: Vec<VertexSet> = sets.iter().filter(|s| !s.is_empty()).cloned().collect();
    let k = sets.len();

    // Pre-union overlapping inputs.
    let mut owner = vec![usize::MAX; g.n()];
    let mut dsu = Dsu::new(k);
    for (i, s) in sets.iter().enumerate() {
        for v in s.iter() {
            if owner[v] == usize::MAX {
                owner[v] = i;
            } else {
                dsu.union(owner[v], i);
            }
        }
    }
    let (base, _) = collect(&sets, &mut dsu);
    let m = base.len();
    for (i, s) in base.iter().enumerate() {
        for v in s.iter() {
            owner[v] = i;
        }
    }

    // Cross weights and volumes between the disjoint base sets.
    let mut cross = vec![vec![0.0; m]; m];
    for (i, s) in base.iter().enumerate() {
        for u in s.iter() {
            for &(v, w) in g.neighbors(u) {
                let j = owner[v];
                if j != usize::MAX && j != i {
                    cross[i][j] += w;
                }
            }
        }
    }
    let mut vol: Vec<f64> = base.iter().map(|s| g.volume(s)).collect();
    let phi = |w: f64, a: f64, b: f64| w / a.min(b);

    let mut dsu = Dsu::new(m);
    let mut merges = 0;
    match rule {
        MergeRule::SingleLinkage => {
            for i in 0..m {
                for j in i + 1..m {
                    if cross[i][j] > 0.0
                        && phi(cross[i][j], vol[i], vol[j]) > threshold
                        && dsu.union(i, j)
                    {
                        merges += 1;
                    }
                }
            }
        }
        MergeRule::Agglomerative => {
            let mut alive = vec![true; m];
            loop {
                let mut best: Option<(f64, usize, usize)> = None;
                for i in (0..m).filter(|&i| alive[i]) {
                    for j in (i + 1..m).filter(|&j| alive[j]) {
                        if cross[i][j] <= 0.0 {
                            continue;
                        }
                        let p = phi(cross[i][j], vol[i], vol[j]);
                        if p > threshold && best.is_none_or(|(b, _, _)| p > b) {
                            best = Some((p, i, j));
                        }
                    }
                }
                let Some((_, i, j)) = best else { break };
                // Fold j into i.
                for l in 0..m {
                    let w = cross[j][l];
                    cross[i][l] += w;
                    cross[l][i] += w;
                    cross[j][l] = 0.0;
                    cross[l][j] = 0.0;
                }
                cross[i][i] = 0.0;
                vol[i] += vol[j];
                alive[j] = false;
                dsu.union(i, j);
                merges += 1;
            }
        }
    }

    let (merged, groups) = collect(&base, &mut dsu);
    // Map base groups back to the caller's (nonempty) input indices.
    let mut base_members = vec![Vec::new(); m];
    for (i, s) in sets.iter().enumerate() {
        if let Some(v) = s.as_slice().first() {
            base_members[owner[*v]].push(i);
        }
    }
    let members = groups
        .into_iter()
        .map(|g| {
            let mut ids: Vec<usize> = g
                .into_iter()
                .flat_map(|b| base_members[b].iter().copied())
                .collect();
            ids.sort_unstable();
            ids
        })
        .collect();
    Ok(MergeOutcome {
        sets: merged,
        merges,
        members,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::random_connected;
    use proptest::prelude::*;
    use rand::Rng as _;

    fn path(n: usize) -> WeightedGraph {
        WeightedGraph::from_edges(n, (0..n - 1).map(|i| (i, i + 1, 1.0))).unwrap()
    }

    #[test]
    fn p4_pair_merges() {
        let g = path(4);
        let sets = [VertexSet::new([0, 1]), VertexSet::new([2, 3])];
        assert!((g.mutual_conductance(&sets[0], &sets[1]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        for rule in [MergeRule::SingleLinkage, MergeRule::Agglomerative] {
            let out = merge_safe_sets(&g, &sets, 0.2, rule).unwrap();
            assert_eq!(out.sets, vec![VertexSet::full(4)]);
            assert_eq!(out.merges, 1);
            assert_eq!(out.members, vec![vec![0, 1]]);
            let none = merge_safe_sets(&g, &sets, 0.5, rule).unwrap();
            assert_eq!(none.sets, sets.to_vec());
        }
    }

    #[test]
    fn rule_names() {
        assert_eq!(
            "agglomerative".parse::<MergeRule>().unwrap(),
            MergeRule::Agglomerative
        );
        assert_eq!(
            "single-linkage".parse::<MergeRule>().unwrap(),
            MergeRule::SingleLinkage
        );
        assert!("ward".parse::<MergeRule>().is_err());
    }

    #[test]
    fn vacuous_thresholds() {
        let g = path(8);
        let sets: Vec<VertexSet> = (0..4).map(|i| VertexSet::new([2 * i, 2 * i + 1])).collect();
        for rule in [MergeRule::SingleLinkage, MergeRule::Agglomerative] {
            let out = merge_safe_sets(&g, &sets, f64::INFINITY, rule).unwrap();
            assert_eq!(out.sets, sets);
            assert_eq!(out.merges, 0);
            let all = merge_safe_sets(&g, &sets, 0.0, rule).unwrap();
            assert_eq!(all.sets, vec![VertexSet::full(8)]);
            assert_eq!(all.merges, 3);
        }
    }

    #[test]
    fn overlaps_are_joined_for_free() {
        let g = path(5);
        let sets = [
            VertexSet::new([0, 1]),
            VertexSet::new([1, 2]),
            VertexSet::new([4]),
        ];
        let out = merge_safe_sets(&g, &sets, f64::INFINITY, MergeRule::Agglomerative).unwrap();
        assert_eq!(
            out.sets,
            vec![VertexSet::new([0, 1, 2]), VertexSet::new([4])]
        );
        assert_eq!(out.merges, 0);
    }

    #[test]
    fn agglomerative_keeps_bridged_cliques_apart() {
        // Two K5 joined by one edge; singletons merge within cliques first,
        // after which the bridge is too weak to join the halves.
        let mut edges = Vec::new();
        for base in [0, 5] {
            for u in base..base + 5 {
                for v in u + 1..base + 5 {
                    edges.push((u, v, 1.0));
                }
            }
        }
        edges.push((4, 5, 1.0));
        let g = WeightedGraph::from_edges(10, edges).unwrap();
        let singles: Vec<VertexSet> = (0..10).map(|v| VertexSet::new([v])).collect();
        let out = merge_safe_sets(&g, &singles, 0.1, MergeRule::Agglomerative).unwrap();
        assert_eq!(out.sets, vec![VertexSet::new(0..5), VertexSet::new(5..10)]);
        // Single linkage chains through the bridge endpoints.
        let chained = merge_safe_sets(&g, &singles, 0.1, MergeRule::SingleLinkage).unwrap();
        assert_eq!(chained.sets, vec![VertexSet::full(10)]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn merge_count_monotone_in_threshold(seed in 0u64..5000, n in 6usize..40, lo in 0.0f64..0.5, gap in 0.0f64..0.5) {
            let g = random_connected(n, 0.1, true, seed);
            let mut rng = crate::rng::stream(seed, &[3]);
            let mut sets = Vec::new();
            let mut current = Vec::new();
            for v in 0..n {
                current.push(v);
                if rng.gen_bool(0.4) {
                    sets.push(VertexSet::new(current.drain(..)));
                }
            }
            sets.push(VertexSet::new(current));
            for rule in [MergeRule::SingleLinkage, MergeRule::Agglomerative] {
                let low = merge_safe_sets(&g, &sets, lo, rule).unwrap();
                let high = merge_safe_sets(&g, &sets, lo + gap, rule).unwrap();
                prop_assert!(high.merges <= low.merges);
                let covered: usize = low.sets.iter().map(VertexSet::len).sum();
                prop_assert_eq!(covered, n);
            }
        }
    }
}
