use super::EquivMap;

/// Stabilizer chain over the n*q points (coordinate, value), built with the
/// deterministic Schreier–Sims procedure. Supports exact order computation,
/// membership tests, and lazy enumeration of all group elements.
pub struct StabChain {
    n: usize,
    q: usize,
    levels: Vec<Level>,
}

struct Level {
    base: usize,
    gens: Vec<EquivMap>,
    /// transversal[p] maps base to p; None outside the orbit.
    transversal: Vec<Option<EquivMap>>,
}

impl Level {
    fn new(base: usize, points: usize, n: usize, q: usize) -> Level {
        let mut transversal = vec![None; points];
        transversal[base] = Some(EquivMap::identity(n, q));
        Level { base, gens: Vec::new(), transversal }
    }

    fn orbit_len(&self) -> usize {
        self.transversal.iter().filter(|t| t.is_some()).count()
    }
}

impl StabChain {
    pub fn from_generators(gens: &[EquivMap], n: usize, q: usize) -> StabChain {
        let mut chain = StabChain { n, q, levels: Vec::new() };
        for g in gens {
            let (residue, j) = chain.strip(g.clone(), 0);
            if !residue.is_identity() {
                chain.append_residue(residue, 0, j);
            }
        }
        chain.complete();
        chain
    }

    fn points(&self) -> usize {
        self.n * self.q
    }

    /// Sift g through levels start.., returning the residue and the level it
    /// got stuck at (levels.len() if it fell through the whole chain).
    fn strip(&self, mut g: EquivMap, start: usize) -> (EquivMap, usize) {
        for lvl in start..self.levels.len() {
            if g.is_identity() {
                return (g, lvl);
            }
            let level = &self.levels[lvl];
            let img = g.act_point(level.base);
            match &level.transversal[img] {
                Some(t) => g = t.inverse().compose(&g),
                None => return (g, lvl),
            }
        }
        (g, self.levels.len())
    }

    /// Store a sifted non-identity residue stuck at level `j` into the
    /// generator sets of levels start..=j; it stabilizes the bases of all of
    /// them and deeper sets must stay subsets of shallower ones.
    fn append_residue(&mut self, residue: EquivMap, start: usize, j: usize) {
        if j == self.levels.len() {
            let base = (0..self.points())
                .find(|&p| residue.act_point(p) != p)
                .expect("non-identity map moves a point");
            let points = self.points();
            self.levels.push(Level::new(base, points, self.n, self.q));
        }
        for m in start..=j {
            self.levels[m].gens.push(residue.clone());
        }
    }

    /// Orbit/transversal of one level under its current generator set.
    fn recompute_orbit(&mut self, lvl: usize) {
        let base = self.levels[lvl].base;
        let points = self.points();
        let mut transversal: Vec<Option<EquivMap>> = vec![None; points];
        transversal[base] = Some(EquivMap::identity(self.n, self.q));
        let mut queue = std::collections::VecDeque::from([base]);
        while let Some(p) = queue.pop_front() {
            let tp = transversal[p].clone().unwrap();
            for g in &self.levels[lvl].gens {
                let img = g.act_point(p);
                if transversal[img].is_none() {
                    transversal[img] = Some(g.compose(&tp));
                    queue.push_back(img);
                }
            }
        }
        self.levels[lvl].transversal = transversal;
    }

    /// Scan every Schreier generator of the level; on the first one that
    /// does not sift to the identity, store its residue and report the level
    /// it landed at.
    fn process_level(&mut self, lvl: usize) -> Option<usize> {
        self.recompute_orbit(lvl);
        let orbit: Vec<usize> = (0..self.points())
            .filter(|&p| self.levels[lvl].transversal[p].is_some())
            .collect();
        let gens = self.levels[lvl].gens.clone();
        for p in orbit {
            let tp = self.levels[lvl].transversal[p].clone().unwrap();
            for g in &gens {
                let img = g.act_point(p);
                let ti = self.levels[lvl].transversal[img].clone().expect("orbit is closed");
                let s = ti.inverse().compose(&g.compose(&tp));
                if s.is_identity() {
                    continue;
                }
                let (residue, j) = self.strip(s, lvl + 1);
                if !residue.is_identity() {
                    self.append_residue(residue, lvl + 1, j);
                    return Some(j);
                }
            }
        }
        None
    }

    /// Downward sweep: verify levels deepest-first; whenever a new residue
    /// lands at level j, resume from j.
    fn complete(&mut self) {
        let mut lvl = self.levels.len() as isize - 1;
        while lvl >= 0 {
            match self.process_level(lvl as usize) {
                Some(j) => lvl = j as isize,
                None => lvl -= 1,
            }
        }
    }

    /// Group order; saturates at u128::MAX for degenerate huge groups.
    pub fn order(&self) -> u128 {
        self.levels
            .iter()
            .fold(1u128, |acc, l| acc.saturating_mul(l.orbit_len() as u128))
    }

    pub fn contains(&self, g: &EquivMap) -> bool {
        self.strip(g.clone(), 0).0.is_identity()
    }

    /// Lazily enumerate every element exactly once.
    pub fn into_elements(self) -> ElementIter {
        let transversals: Vec<Vec<EquivMap>> = self
            .levels
            .iter()
            .map(|l| l.transversal.iter().flatten().cloned().collect())
            .collect();
        ElementIter::new(self.n, self.q, transversals)
    }
}

/// Odometer over the transversals: every element factors uniquely as
/// t_0 ∘ t_1 ∘ ... with t_k from the k-th transversal.
pub struct ElementIter {
    n: usize,
    q: usize,
    transversals: Vec<Vec<EquivMap>>,
    idx: Vec<usize>,
    /// prefix[k] = t_0 ∘ ... ∘ t_k for the current indices
    prefix: Vec<EquivMap>,
    started: bool,
    done: bool,
}

impl ElementIter {
    fn new(n: usize, q: usize, transversals: Vec<Vec<EquivMap>>) -> ElementIter {
        let idx = vec![0; transversals.len()];
        ElementIter { n, q, transversals, idx, prefix: Vec::new(), started: false, done: false }
    }

    fn recompute_prefix(&mut self, from: usize) {
        self.prefix.truncate(from);
        for k in from..self.transversals.len() {
            let t = &self.transversals[k][self.idx[k]];
            let p = match self.prefix.last() {
                Some(prev) => prev.compose(t),
                None => t.clone(),
            };
            self.prefix.push(p);
        }
    }

    fn current(&self) -> EquivMap {
        match self.prefix.last() {
            Some(p) => p.clone(),
            None => EquivMap::identity(self.n, self.q),
        }
    }
}

impl Iterator for ElementIter {
    type Item = EquivMap;

    fn next(&mut self) -> Option<EquivMap> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.recompute_prefix(0);
            return Some(self.current());
        }
        // advance the deepest digit that can move
        let mut k = self.transversals.len();
        loop {
            if k == 0 {
                self.done = true;
                return None;
            }
            k -= 1;
            if self.idx[k] + 1 < self.transversals[k].len() {
                self.idx[k] += 1;
                for d in self.idx.iter_mut().skip(k + 1) {
                    *d = 0;
                }
                self.recompute_prefix(k);
                return Some(self.current());
            }
        }
    }
}
