//! Deterministic Schreier–Sims: a base and strong generating set with one
//! orbit transversal per base point.

use super::perm::Permutation;

#[derive(Clone, Debug)]
struct Transversal {
    base_point: usize,
    /// `reps[p] = Some(u)` with `u(base_point) = p` for every orbit point `p`.
    reps: Vec<Option<Permutation>>,
    orbit: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct StabilizerChain {
    degree: usize,
    base: Vec<usize>,
    strong_gens: Vec<Permutation>,
    transversals: Vec<Transversal>,
}

impl StabilizerChain {
    pub fn new(degree: usize, generators: &[Permutation]) -> Self {
        let mut strong_gens: Vec<Permutation> = Vec::new();
        for g in generators {
            if !g.is_identity() && !strong_gens.contains(g) {
                strong_gens.push(g.clone());
            }
        }
        let mut base = Vec::new();
        for g in &strong_gens {
            if base.iter().all(|&b| g.apply(b) == b) {
                base.push(g.first_moved_point().expect("non-identity"));
            }
        }
        let mut builder = Builder {
            degree,
            base,
            strong_gens,
            cache: Vec::new(),
        };
        builder.run();
        let transversals = (0..builder.base.len())
            .map(|i| builder.transversal(i).clone())
            .collect();
        StabilizerChain {
            degree,
            base: builder.base,
            strong_gens: builder.strong_gens,
            transversals,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> &[usize] {
        &self.base
    }

    pub fn strong_generators(&self) -> &[Permutation] {
        &self.strong_gens
    }

    pub fn order(&self) -> u64 {
        self.transversals
            .iter()
            .map(|t| t.orbit.len() as u64)
            .product()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        sift(&self.transversals, g.clone(), 0).0.is_identity()
    }
}

struct Builder {
    degree: usize,
    base: Vec<usize>,
    strong_gens: Vec<Permutation>,
    cache: Vec<Option<Transversal>>,
}

impl Builder {
    /// Strong generators fixing `base[..level]` pointwise.
    fn level_gens(&self, level: usize) -> Vec<&Permutation> {
        self.strong_gens
            .iter()
            .filter(|g| self.base[..level].iter().all(|&b| g.apply(b) == b))
            .collect()
    }

    fn transversal(&mut self, level: usize) -> &Transversal {
        if self.cache.len() < self.base.len() {
            self.cache.resize(self.base.len(), None);
        }
        if self.cache[level].is_none() {
            let gens: Vec<Permutation> = self.level_gens(level).into_iter().cloned().collect();
            let t = orbit_transversal(self.degree, self.base[level], &gens);
            self.cache[level] = Some(t);
        }
        self.cache[level].as_ref().unwrap()
    }

    fn strip(&mut self, g: Permutation, from: usize) -> (Permutation, usize) {
        let mut h = g;
        for level in from..self.base.len() {
            let t = self.transversal(level);
            let p = h.apply(t.base_point);
            match &t.reps[p] {
                Some(u) => h = u.inverse().compose(&h),
                None => return (h, level),
            }
        }
        (h, self.base.len())
    }

    fn run(&mut self) {
        let mut i = self.base.len();
        while i > 0 {
            let level = i - 1;
            let t = self.transversal(level).clone();
            let gens: Vec<Permutation> = self.level_gens(level).into_iter().cloned().collect();
            let mut restart = None;
            'search: for &p in &t.orbit {
                let up = t.reps[p].as_ref().unwrap();
                for s in &gens {
                    let sp = s.apply(p);
                    let usp = t.reps[sp].as_ref().unwrap();
                    let schreier = usp.inverse().compose(s).compose(up);
                    if schreier.is_identity() {
                        continue;
                    }
                    let (h, j) = self.strip(schreier, level + 1);
                    if !h.is_identity() {
                        if j == self.base.len() {
                            // h fixes every base point, so it moves a new one
                            self.base.push(h.first_moved_point().unwrap());
                        }
                        self.strong_gens.push(h);
                        self.cache.resize(self.base.len(), None);
                        for slot in self.cache.iter_mut().take(j + 1) {
                            *slot = None;
                        }
                        restart = Some(j + 1);
                        break 'search;
                    }
                }
            }
            match restart {
                Some(r) => i = r,
                None => i -= 1,
            }
        }
    }
}

fn orbit_transversal(degree: usize, base_point: usize, gens: &[Permutation]) -> Transversal {
    let mut reps: Vec<Option<Permutation>> = vec![None; degree];
    reps[base_point] = Some(Permutation::identity(degree));
    let mut orbit = vec![base_point];
    let mut head = 0;
    while head < orbit.len() {
        let p = orbit[head];
        head += 1;
        for s in gens {
            let q = s.apply(p);
            if reps[q].is_none() {
                reps[q] = Some(s.compose(reps[p].as_ref().unwrap()));
                orbit.push(q);
            }
        }
    }
    Transversal {
        base_point,
        reps,
        orbit,
    }
}

fn sift(transversals: &[Transversal], g: Permutation, from: usize) -> (Permutation, usize) {
    let mut h = g;
    for (level, t) in transversals.iter().enumerate().skip(from) {
        let p = h.apply(t.base_point);
        match &t.reps[p] {
            Some(u) => h = u.inverse().compose(&h),
            None => return (h, level),
        }
    }
    (h, transversals.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: usize) -> Permutation {
        Permutation::from_images((0..n as u32).map(|i| (i + 1) % n as u32).collect()).unwrap()
    }

    fn transposition(n: usize, a: u32, b: u32) -> Permutation {
        Permutation::from_cycles(n, &[&[a, b]]).unwrap()
    }

    #[test]
    fn symmetric_orders() {
        let mut fact = 1u64;
        for n in 2..=9 {
            fact *= n as u64;
            let chain = StabilizerChain::new(n, &[transposition(n, 0, 1), cyc(n)]);
            assert_eq!(chain.order(), fact, "S{n}");
        }
    }

    #[test]
    fn trivial_group() {
        let chain = StabilizerChain::new(4, &[]);
        assert_eq!(chain.order(), 1);
        assert!(chain.contains(&Permutation::identity(4)));
        assert!(!chain.contains(&cyc(4)));
    }

    #[test]
    fn membership_in_cyclic_subgroup() {
        let c = cyc(6);
        let chain = StabilizerChain::new(6, &[c.pow(2)]);
        assert_eq!(chain.order(), 3);
        assert!(chain.contains(&c.pow(4)));
        assert!(!chain.contains(&c));
        assert!(!chain.contains(&transposition(6, 0, 1)));
    }
}
