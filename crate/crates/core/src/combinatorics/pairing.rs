/// Which matchings a contraction rule admits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairingKind {
    /// Every slot may pair with every other: all `(2m-1)!!` perfect matchings.
    Perfect,
    /// Each pair joins one plain and one conjugated slot: `m!` matchings.
    Bipartite,
}

/// A perfect matching of slot indices; each pair is `(lower, higher)` for
/// [`PairingKind::Perfect`] and `(plain, conjugated)` for
/// [`PairingKind::Bipartite`].
pub type Pairing = Vec<(usize, usize)>;

/// Streaming enumeration of pairings in a fixed depth-first order.
///
/// Nothing beyond the current partial matching is held in memory.
pub struct Pairings {
    kind: PairingKind,
    /// Slots that choose a partner, in order.
    choosers: Vec<usize>,
    /// Candidate partners for bipartite matching.
    partners: Vec<usize>,
    n_slots: usize,
    used: Vec<bool>,
    /// `(chooser, partner, next candidate position)` at each depth.
    stack: Vec<(usize, usize, usize)>,
    done: bool,
}

/// Enumerates all pairings of slots whose conjugation flags are `conj`.
///
/// An odd slot count, or unequal plain/conjugated counts in the bipartite
/// case, yields an empty stream.
pub fn enumerate_pairings(conj: &[bool], kind: PairingKind) -> Pairings {
    let n = conj.len();
    let (choosers, partners): (Vec<usize>, Vec<usize>) = match kind {
        PairingKind::Perfect => (Vec::new(), Vec::new()),
        PairingKind::Bipartite => (
            (0..n).filter(|&i| !conj[i]).collect(),
            (0..n).filter(|&i| conj[i]).collect(),
        ),
    };
    let feasible = match kind {
        PairingKind::Perfect => n % 2 == 0,
        PairingKind::Bipartite => choosers.len() == partners.len(),
    };
    Pairings {
        kind,
        choosers,
        partners,
        n_slots: n,
        used: vec![false; n],
        stack: Vec::new(),
        done: !feasible,
    }
}

impl Pairings {
    fn depth_target(&self) -> usize {
        self.n_slots / 2
    }

    /// The slot that picks a partner at the current depth.
    fn chooser(&self) -> Option<usize> {
        match self.kind {
            PairingKind::Perfect => (0..self.n_slots).find(|&i| !self.used[i]),
            PairingKind::Bipartite => self.choosers.get(self.stack.len()).copied(),
        }
    }

    /// Candidate partners for `a`, starting the search at position `from`.
    fn next_partner(&self, a: usize, from: usize) -> Option<(usize, usize)> {
        match self.kind {
            PairingKind::Perfect => (from.max(a + 1)..self.n_slots)
                .find(|&b| !self.used[b])
                .map(|b| (b, b + 1)),
            PairingKind::Bipartite => (from..self.partners.len())
                .find(|&i| !self.used[self.partners[i]])
                .map(|i| (self.partners[i], i + 1)),
        }
    }

    fn current(&self) -> Pairing {
        self.stack.iter().map(|&(a, b, _)| (a, b)).collect()
    }

    /// Descends from the current state to the next complete matching, trying
    /// candidates from `from` at the current depth.
    fn descend(&mut self, mut from: usize) -> bool {
        loop {
            if self.stack.len() == self.depth_target() {
                return true;
            }
            let a = self.chooser().expect("chooser exists below target depth");
            match self.next_partner(a, from) {
                Some((b, resume)) => {
                    self.used[a] = true;
                    self.used[b] = true;
                    self.stack.push((a, b, resume));
                    from = 0;
                }
                None => {
                    // backtrack one level
                    match self.pop() {
                        Some(resume) => from = resume,
                        None => return false,
                    }
                }
            }
        }
    }

    /// Removes the deepest pair; returns where to resume the search.
    fn pop(&mut self) -> Option<usize> {
        let (a, b, resume) = self.stack.pop()?;
        self.used[a] = false;
        self.used[b] = false;
        Some(resume)
    }
}

impl Iterator for Pairings {
    type Item = Pairing;

    fn next(&mut self) -> Option<Pairing> {
        if self.done {
            return None;
        }
        let found = if self.stack.len() == self.depth_target() && self.depth_target() > 0 {
            match self.pop() {
                Some(resume) => self.descend(resume),
                None => false,
            }
        } else if self.stack.is_empty() && self.depth_target() == 0 {
            // the empty matching of zero slots, emitted once
            self.done = true;
            return Some(Vec::new());
        } else {
            self.descend(0)
        };
        if found {
            Some(self.current())
        } else {
            self.done = true;
            None
        }
    }
}

/// `(2m-1)!!`.
pub fn double_factorial_odd(m: u64) -> u64 {
    (1..=m).map(|i| 2 * i - 1).product()
}
