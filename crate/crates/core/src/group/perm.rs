//! Permutations on `0..n` as image arrays and a deterministic Schreier–Sims
//! stabilizer chain for order computation and membership testing.
//!
//! Composition is right-to-left: `(a·b)(i) = a(b(i))`.

use std::collections::VecDeque;

pub type Perm = Vec<u8>;

pub fn identity(n: usize) -> Perm {
    (0..n as u8).collect()
}

pub fn compose(a: &[u8], b: &[u8]) -> Perm {
    b.iter().map(|&i| a[i as usize]).collect()
}

pub fn inverse(a: &[u8]) -> Perm {
    let mut out = vec![0u8; a.len()];
    for (i, &j) in a.iter().enumerate() {
        out[j as usize] = i as u8;
    }
    out
}

pub fn is_identity(a: &[u8]) -> bool {
    a.iter().enumerate().all(|(i, &j)| i == j as usize)
}

pub fn is_permutation(a: &[u8]) -> bool {
    let mut seen = vec![false; a.len()];
    for &j in a {
        let j = j as usize;
        if j >= a.len() || seen[j] {
            return false;
        }
        seen[j] = true;
    }
    true
}

#[derive(Clone, Debug)]
struct Level {
    base: u8,
    gens: Vec<Perm>,
    /// `transversal[x]` maps the base point to `x`.
    transversal: Vec<Option<Perm>>,
}

impl Level {
    fn new(base: u8, n: usize) -> Self {
        let mut transversal = vec![None; n];
        transversal[base as usize] = Some(identity(n));
        Level {
            base,
            gens: Vec::new(),
            transversal,
        }
    }

    fn rebuild_orbit(&mut self, n: usize) {
        self.transversal = vec![None; n];
        self.transversal[self.base as usize] = Some(identity(n));
        let mut queue = VecDeque::from([self.base]);
        while let Some(x) = queue.pop_front() {
            let ux = self.transversal[x as usize].clone().unwrap();
            for s in &self.gens {
                let y = s[x as usize];
                if self.transversal[y as usize].is_none() {
                    self.transversal[y as usize] = Some(compose(s, &ux));
                    queue.push_back(y);
                }
            }
        }
    }

    fn orbit(&self) -> impl Iterator<Item = u8> + '_ {
        self.transversal
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_some())
            .map(|(i, _)| i as u8)
    }

    fn orbit_len(&self) -> usize {
        self.transversal.iter().filter(|t| t.is_some()).count()
    }
}

/// Stabilizer chain of the group generated by a list of permutations.
#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    pub fn new(degree: usize, generators: &[Perm]) -> Self {
        let mut chain = StabChain {
            degree,
            levels: Vec::new(),
        };
        for g in generators {
            if let Some((residue, depth)) = chain.sift_from(g.clone(), 0) {
                chain.add_generator(residue, depth);
            }
        }
        chain.complete();
        chain
    }

    /// Sift `g` through levels `start..`. Returns `None` if it sifts to the
    /// identity, else the residue and the level where sifting stopped.
    fn sift_from(&self, mut g: Perm, start: usize) -> Option<(Perm, usize)> {
        for (i, level) in self.levels.iter().enumerate().skip(start) {
            let x = g[level.base as usize];
            match &level.transversal[x as usize] {
                Some(u) => g = compose(&inverse(u), &g),
                None => return Some((g, i)),
            }
        }
        if is_identity(&g) {
            None
        } else {
            Some((g, self.levels.len()))
        }
    }

    fn add_generator(&mut self, g: Perm, depth: usize) {
        if depth == self.levels.len() {
            let moved = g
                .iter()
                .enumerate()
                .find(|(i, &j)| *i != j as usize)
                .map(|(i, _)| i as u8)
                .expect("residue is not the identity");
            self.levels.push(Level::new(moved, self.degree));
        }
        for level in self.levels.iter_mut().take(depth + 1) {
            level.gens.push(g.clone());
            level.rebuild_orbit(self.degree);
        }
    }

    fn complete(&mut self) {
        'outer: loop {
            for i in (0..self.levels.len()).rev() {
                let level = &self.levels[i];
                let orbit: Vec<u8> = level.orbit().collect();
                for x in orbit {
                    let ux = self.levels[i].transversal[x as usize].clone().unwrap();
                    for s in self.levels[i].gens.clone() {
                        let y = s[x as usize];
                        let uy = self.levels[i].transversal[y as usize].clone().unwrap();
                        let schreier = compose(&inverse(&uy), &compose(&s, &ux));
                        if let Some((residue, depth)) = self.sift_from(schreier, i + 1) {
                            self.add_generator(residue, depth);
                            continue 'outer;
                        }
                    }
                }
            }
            break;
        }
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit_len() as u128).product()
    }

    pub fn contains(&self, g: &[u8]) -> bool {
        g.len() == self.degree && is_permutation(g) && self.sift_from(g.to_vec(), 0).is_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Perm {
        (0..n).map(|i| ((i + 1) % n) as u8).collect()
    }

    fn transposition(n: usize, a: usize, b: usize) -> Perm {
        let mut p = identity(n);
        p.swap(a, b);
        p
    }

    #[test]
    fn symmetric_group_orders() {
        let mut fact = 1u128;
        for n in 2..=10 {
            fact *= n as u128;
            let chain = StabChain::new(n, &[transposition(n, 0, 1), cycle(n)]);
            assert_eq!(chain.order(), fact, "S_{n}");
        }
    }

    #[test]
    fn alternating_and_cyclic() {
        // 3-cycles (0 1 2), (0 1 3) generate A4.
        let a: Perm = vec![1, 2, 0, 3];
        let b: Perm = vec![1, 3, 2, 0];
        let chain = StabChain::new(4, &[a, b]);
        assert_eq!(chain.order(), 12);
        assert!(!chain.contains(&transposition(4, 0, 1)));
        assert!(chain.contains(&[2, 0, 1, 3]));
        assert_eq!(StabChain::new(7, &[cycle(7)]).order(), 7);
        assert_eq!(StabChain::new(5, &[]).order(), 1);
    }

    #[test]
    fn composition_is_right_to_left() {
        let a = transposition(3, 0, 1);
        let b = transposition(3, 1, 2);
        // a(b(0)) = a(0) = 1
        assert_eq!(compose(&a, &b)[0], 1);
        assert!(is_identity(&compose(&a, &inverse(&a))));
    }
}
