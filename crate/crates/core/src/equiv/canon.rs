use super::stabchain::StabChain;
use super::EquivMap;
use crate::codes::Code;
use std::collections::{BTreeMap, HashMap};

/// Output of canonical labeling: the canonical representative of the
/// equivalence class, a map carrying the input onto it, and generators plus
/// the exact order of the automorphism group of the input.
pub struct CanonResult {
    pub canon: Code,
    pub transporter: EquivMap,
    pub aut_gens: Vec<EquivMap>,
    pub aut_order: u128,
}

/// Canonical form under coordinate and per-coordinate symbol permutations,
/// by individualization–refinement over the n*q points. The certificate of a
/// leaf is the relabeled code itself; the minimum over the pruned search tree
/// of (refinement invariant sequence, certificate) is canonical.
pub fn canonicalize(code: &Code) -> CanonResult {
    let (n, q) = (code.n(), code.q());
    if code.is_empty() {
        let gens = super::full_group_generators(n, q);
        let mut order: u128 = (1..=n as u128).product();
        let fact_q: u128 = (1..=q as u128).product();
        for _ in 0..n {
            order = order.saturating_mul(fact_q);
        }
        return CanonResult {
            canon: code.clone(),
            transporter: EquivMap::identity(n, q),
            aut_gens: gens,
            aut_order: order,
        };
    }
    let mut search = Search::new(code);
    search.run();
    let best = search.best.expect("non-empty code has at least one leaf");
    let chain = StabChain::from_generators(&search.aut_gens, n, q);
    CanonResult {
        canon: Code::from_sorted_flat(q, n, best.cert),
        transporter: best.g,
        aut_gens: search.aut_gens,
        aut_order: chain.order(),
    }
}

struct Best {
    invs: Vec<Vec<u32>>,
    cert: Vec<u8>,
    g: EquivMap,
}

struct Frame {
    cells: Vec<Vec<u16>>,
    inv: Vec<u32>,
    /// candidate points of the target cell; empty means leaf
    candidates: Vec<u16>,
    next: usize,
    /// candidates actually descended into (or covered by pruning)
    processed: Vec<u16>,
    /// point individualized to enter this frame (None at the root)
    point: Option<u16>,
}

struct Search<'a> {
    code: &'a Code,
    n: usize,
    q: usize,
    points: usize,
    m: usize,
    point_words: Vec<Vec<u32>>,
    best: Option<Best>,
    aut_gens: Vec<EquivMap>,
    cert_map: HashMap<Vec<u8>, (EquivMap, Vec<u16>)>,
}

impl<'a> Search<'a> {
    fn new(code: &'a Code) -> Search<'a> {
        let (n, q, m) = (code.n(), code.q(), code.len());
        let points = n * q;
        let mut point_words = vec![Vec::new(); points];
        for (w, word) in code.words().enumerate() {
            for (i, &v) in word.iter().enumerate() {
                point_words[i * q + v as usize].push(w as u32);
            }
        }
        Search { code, n, q, points, m, point_words, best: None, aut_gens: Vec::new(), cert_map: HashMap::new() }
    }

    /// Refine to a fixed point: words are colored by the multiset of cells
    /// their points lie in; cells split by incident word colors together with
    /// the cells of same-coordinate companions. Returns the node invariant.
    fn refine(&self, cells: &mut Vec<Vec<u16>>) -> Vec<u32> {
        let q = self.q;
        loop {
            let mut point_cell = vec![0u32; self.points];
            for (ci, cell) in cells.iter().enumerate() {
                for &p in cell {
                    point_cell[p as usize] = ci as u32;
                }
            }
            let mut wsigs: Vec<Vec<u32>> = Vec::with_capacity(self.m);
            for word in self.code.words() {
                let mut sig: Vec<u32> = word
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| point_cell[i * q + v as usize])
                    .collect();
                sig.sort_unstable();
                wsigs.push(sig);
            }
            let mut sig_color: BTreeMap<&[u32], u32> = BTreeMap::new();
            for sig in &wsigs {
                sig_color.entry(sig).or_insert(0);
            }
            let mut next = 0u32;
            for c in sig_color.values_mut() {
                *c = next;
                next += 1;
            }
            let n_wcolors = next as usize;
            let word_color: Vec<u32> = wsigs.iter().map(|s| sig_color[s.as_slice()]).collect();

            let n_cells = cells.len();
            let mut new_cells: Vec<Vec<u16>> = Vec::with_capacity(n_cells);
            let mut changed = false;
            for cell in cells.iter() {
                if cell.len() == 1 {
                    new_cells.push(cell.clone());
                    continue;
                }
                let mut groups: BTreeMap<Vec<u32>, Vec<u16>> = BTreeMap::new();
                for &p in cell {
                    let i = p as usize / q;
                    let mut sig = vec![0u32; n_wcolors + n_cells];
                    for &w in &self.point_words[p as usize] {
                        sig[word_color[w as usize] as usize] += 1;
                    }
                    for u in 0..q {
                        let up = i * q + u;
                        if up != p as usize {
                            sig[n_wcolors + point_cell[up] as usize] += 1;
                        }
                    }
                    groups.entry(sig).or_default().push(p);
                }
                if groups.len() > 1 {
                    changed = true;
                }
                for grp in groups.into_values() {
                    new_cells.push(grp);
                }
            }
            *cells = new_cells;
            if !changed {
                let mut inv = Vec::with_capacity(2 + cells.len() + n_wcolors);
                inv.push(cells.len() as u32);
                inv.extend(cells.iter().map(|c| c.len() as u32));
                inv.push(n_wcolors as u32);
                let mut counts = vec![0u32; n_wcolors];
                for &c in &word_color {
                    counts[c as usize] += 1;
                }
                inv.extend(counts);
                return inv;
            }
        }
    }

    fn make_frame(&self, mut cells: Vec<Vec<u16>>, point: Option<u16>) -> Frame {
        let inv = self.refine(&mut cells);
        let candidates = cells
            .iter()
            .filter(|c| c.len() >= 2)
            .min_by_key(|c| c.len())
            .map(|c| c.clone())
            .unwrap_or_default();
        Frame { cells, inv, candidates, next: 0, processed: Vec::new(), point }
    }

    fn individualize(cells: &[Vec<u16>], x: u16) -> Vec<Vec<u16>> {
        let mut out = Vec::with_capacity(cells.len() + 1);
        for cell in cells {
            if cell.len() >= 2 && cell.contains(&x) {
                out.push(vec![x]);
                out.push(cell.iter().copied().filter(|&p| p != x).collect());
            } else {
                out.push(cell.clone());
            }
        }
        out
    }

    /// Extract the group element a discrete partition encodes: coordinates
    /// ordered by the minimum rank of their points, symbols within each
    /// coordinate by rank.
    fn leaf_map(&self, cells: &[Vec<u16>]) -> EquivMap {
        let mut rank = vec![0usize; self.points];
        for (r, cell) in cells.iter().enumerate() {
            rank[cell[0] as usize] = r;
        }
        let mut coord_min: Vec<(usize, usize)> = (0..self.n)
            .map(|i| ((0..self.q).map(|v| rank[i * self.q + v]).min().unwrap(), i))
            .collect();
        coord_min.sort_unstable();
        let mut pi = vec![0usize; self.n];
        for (pos, &(_, i)) in coord_min.iter().enumerate() {
            pi[i] = pos;
        }
        let mut sigma = vec![vec![0u8; self.q]; self.n];
        for i in 0..self.n {
            let mut by_rank: Vec<(usize, usize)> =
                (0..self.q).map(|v| (rank[i * self.q + v], v)).collect();
            by_rank.sort_unstable();
            for (pos, &(_, v)) in by_rank.iter().enumerate() {
                sigma[pi[i]][v] = pos as u8;
            }
        }
        EquivMap::new(self.n, self.q, pi, sigma).expect("leaf ordering yields a valid map")
    }

    fn cert_of(&self, g: &EquivMap) -> Vec<u8> {
        g.apply(self.code).flat().to_vec()
    }

    /// Orbit representative of each point under the stored automorphisms
    /// fixing every point of `path`.
    fn prefix_orbits(&self, path: &[u16]) -> Vec<usize> {
        let fixing: Vec<EquivMap> = self
            .aut_gens
            .iter()
            .filter(|g| path.iter().all(|&p| g.act_point(p as usize) == p as usize))
            .cloned()
            .collect();
        super::point_orbits(&fixing, self.n, self.q)
    }

    fn run(&mut self) {
        let initial = vec![(0..self.points as u16).collect::<Vec<u16>>()];
        let root = self.make_frame(initial, None);
        let mut stack = vec![root];
        while let Some(top) = stack.last() {
            if top.candidates.is_empty() {
                self.process_leaf(&mut stack);
                continue;
            }
            let depth = stack.len() - 1;
            let path: Vec<u16> = stack[1..].iter().map(|f| f.point.unwrap()).collect();
            let frame = stack.last_mut().unwrap();
            let Some(&x) = frame.candidates.get(frame.next) else {
                stack.pop();
                continue;
            };
            frame.next += 1;
            if !frame.processed.is_empty() {
                let orbits = self.prefix_orbits(&path);
                let frame = stack.last_mut().unwrap();
                if frame.processed.iter().any(|&y| orbits[y as usize] == orbits[x as usize]) {
                    continue;
                }
            }
            let frame = stack.last_mut().unwrap();
            frame.processed.push(x);
            let cells = Self::individualize(&frame.cells, x);
            let child = self.make_frame(cells, Some(x));
            if let Some(best) = &self.best {
                let child_depth = depth + 1;
                debug_assert!(child_depth < best.invs.len());
                match child.inv.cmp(&best.invs[child_depth]) {
                    std::cmp::Ordering::Greater => continue,
                    std::cmp::Ordering::Less => self.best = None,
                    std::cmp::Ordering::Equal => {}
                }
            }
            stack.push(child);
        }
    }

    fn process_leaf(&mut self, stack: &mut Vec<Frame>) {
        let leaf = stack.last().unwrap();
        let g = self.leaf_map(&leaf.cells);
        let cert = self.cert_of(&g);
        let path: Vec<u16> = stack[1..].iter().map(|f| f.point.unwrap()).collect();
        if let Some((prev_g, prev_path)) = self.cert_map.get(&cert) {
            // same certificate as an earlier leaf: record the automorphism
            // and jump back to the deepest common ancestor
            let gamma = prev_g.inverse().compose(&g);
            let mut common = 0;
            while common < path.len()
                && common < prev_path.len()
                && path[common] == prev_path[common]
            {
                common += 1;
            }
            if gamma.is_identity() {
                stack.pop();
            } else {
                self.aut_gens.push(gamma);
                stack.truncate(common + 1);
            }
            return;
        }
        self.cert_map.insert(cert.clone(), (g.clone(), path.clone()));
        let invs: Vec<Vec<u32>> = stack.iter().map(|f| f.inv.clone()).collect();
        let better = match &self.best {
            None => true,
            Some(b) => cert < b.cert,
        };
        if better {
            self.best = Some(Best { invs, cert, g });
        }
        stack.pop();
    }

}

#[cfg(test)]
pub(crate) mod testutil {
    use super::super::EquivMap;

    fn permutations(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for rest in permutations(k - 1) {
            for pos in 0..k {
                let mut p = rest.clone();
                p.insert(pos, k - 1);
                out.push(p);
            }
        }
        out
    }

    /// Every equivalence map on n coordinates over q symbols; for exhaustive
    /// oracles at tiny sizes only.
    pub(crate) fn all_maps(n: usize, q: usize) -> Vec<EquivMap> {
        let coord_perms = permutations(n);
        let sym_perms: Vec<Vec<u8>> = permutations(q)
            .into_iter()
            .map(|p| p.into_iter().map(|v| v as u8).collect())
            .collect();
        let mut out = Vec::new();
        let mut idx = vec![0usize; n];
        loop {
            for pi in &coord_perms {
                let sigma: Vec<Vec<u8>> = idx.iter().map(|&k| sym_perms[k].clone()).collect();
                out.push(EquivMap::new(n, q, pi.clone(), sigma).unwrap());
            }
            let mut d = n;
            loop {
                if d == 0 {
                    return out;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < sym_perms.len() {
                    break;
                }
                idx[d] = 0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::all_maps;
    use super::*;
    use crate::codes::Code;
    use crate::gf::Field;
    use crate::linear::{kernel_code, mds_parity_check};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn brute_canon(code: &Code) -> Code {
        all_maps(code.n(), code.q())
            .into_iter()
            .map(|g| g.apply(code))
            .min_by(|a, b| a.flat().cmp(b.flat()))
            .unwrap()
    }

    fn brute_aut_order(code: &Code) -> u128 {
        all_maps(code.n(), code.q())
            .into_iter()
            .filter(|g| &g.apply(code) == code)
            .count() as u128
    }

    #[test]
    fn ternary_repetition_code() {
        let code =
            Code::from_words(3, 3, vec![vec![0, 0, 0], vec![1, 1, 1], vec![2, 2, 2]]).unwrap();
        let r = canonicalize(&code);
        assert_eq!(r.transporter.apply(&code), r.canon);
        assert_eq!(r.canon, brute_canon(&code));
        assert_eq!(r.aut_order, brute_aut_order(&code));
        for g in &r.aut_gens {
            assert_eq!(&g.apply(&code), &code);
        }
    }

    #[test]
    fn matches_brute_force_on_random_small_codes() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        use rand::Rng;
        for trial in 0..40 {
            let (n, q) = if trial % 2 == 0 { (3, 3) } else { (4, 2) };
            let m = rng.gen_range(1..=5usize);
            let mut words = std::collections::BTreeSet::new();
            while words.len() < m {
                let w: Vec<u8> = (0..n).map(|_| rng.gen_range(0..q as u8)).collect();
                words.insert(w);
            }
            let code = Code::from_words(q, n, words).unwrap();
            let r = canonicalize(&code);
            assert_eq!(r.transporter.apply(&code), r.canon, "transporter mismatch");
            assert_eq!(r.canon, brute_canon(&code), "canon mismatch for {code:?}");
            assert_eq!(r.aut_order, brute_aut_order(&code), "aut order mismatch for {code:?}");
        }
    }

    #[test]
    fn invariance_under_random_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let f = Field::new(3).unwrap();
        let code = kernel_code(&f, &mds_parity_check(&f, 4).unwrap()).unwrap();
        let base = canonicalize(&code);
        for _ in 0..60 {
            let g = EquivMap::random(4, 3, &mut rng);
            let image = g.apply(&code);
            let r = canonicalize(&image);
            assert_eq!(r.canon, base.canon);
            assert_eq!(r.aut_order, base.aut_order);
            assert_eq!(r.transporter.apply(&image), r.canon);
        }
    }

    #[test]
    fn ternary_mds_aut_order() {
        // the Hamming(4, 3) code: automorphisms = 4! * semilinear part = 432
        let f = Field::new(3).unwrap();
        let code = kernel_code(&f, &mds_parity_check(&f, 4).unwrap()).unwrap();
        let r = canonicalize(&code);
        assert_eq!(r.aut_order, brute_aut_order(&code));
        assert_eq!(r.aut_order, 432);
    }

    #[test]
    fn empty_and_tiny_codes() {
        let empty = Code::from_words(3, 2, Vec::<Vec<u8>>::new()).unwrap();
        let r = canonicalize(&empty);
        assert_eq!(r.aut_order, 2 * 36);
        assert!(r.transporter.is_identity());
        let single = Code::from_words(3, 2, vec![vec![1, 2]]).unwrap();
        let r = canonicalize(&single);
        assert_eq!(r.canon.word(0), &[0, 0]);
        assert_eq!(r.aut_order, brute_aut_order(&single));
    }

    #[test]
    fn iso_set_size_equals_aut_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let f = Field::new(3).unwrap();
        let code = kernel_code(&f, &mds_parity_check(&f, 4).unwrap()).unwrap();
        let g = EquivMap::random(4, 3, &mut rng);
        let image = g.apply(&code);
        let isos: Vec<_> = crate::equiv::iso_set(&code, &image).collect();
        let r = canonicalize(&code);
        assert_eq!(isos.len() as u128, r.aut_order);
        let mut seen = std::collections::HashSet::new();
        for h in &isos {
            assert_eq!(h.apply(&code), image);
            assert!(seen.insert(h.clone()));
        }
        // inequivalent codes give the empty set
        let other = Code::from_words(3, 4, vec![vec![0, 0, 0, 0], vec![1, 1, 1, 1]]).unwrap();
        assert_eq!(crate::equiv::iso_set(&code, &other).count(), 0);
    }
}
