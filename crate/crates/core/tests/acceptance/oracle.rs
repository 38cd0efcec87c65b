//! Brute-force references. Nothing here calls the library's searches; the
//! library is only used for its data types.

use mmsnp::{Clause, FinStructure, Sentence, Signature};

/// Colour-preserving homomorphism test by plain backtracking. Uncoloured
/// source elements may go anywhere.
pub fn brute_hom(a: &FinStructure, b: &FinStructure) -> bool {
    let n = a.len();
    // tuples checked once their last element is placed
    let mut due: Vec<Vec<(usize, &Vec<usize>)>> = vec![Vec::new(); n];
    for s in 0..a.signature().len() {
        for t in a.tuples(s) {
            if let Some(&last) = t.iter().max() {
                due[last].push((s, t));
            }
        }
    }
    let mut f = vec![0usize; n];
    place(0, a, b, &due, &mut f)
}

fn place(e: usize, a: &FinStructure, b: &FinStructure, due: &[Vec<(usize, &Vec<usize>)>], f: &mut [usize]) -> bool {
    if e == a.len() {
        return true;
    }
    for t in 0..b.len() {
        if a.colour(e).is_some() && a.colour(e) != b.colour(t) {
            continue;
        }
        f[e] = t;
        let ok = due[e].iter().all(|(s, tuple)| {
            let image: Vec<usize> = tuple.iter().map(|&x| f[x]).collect();
            b.has_tuple(*s, &image)
        });
        if ok && place(e + 1, a, b, due, f) {
            return true;
        }
    }
    false
}

/// Whether no structure of `obstructions` maps into `a`.
pub fn is_obstruction_free(a: &FinStructure, obstructions: &[FinStructure]) -> bool {
    obstructions.iter().all(|f| !brute_hom(f, a))
}

/// The graph on `n` elements whose edge `(u, v)` is bit `u * n + v` of
/// `mask`, over a signature whose only symbol is binary.
pub fn graph(tau: &Signature, colours: &[String], n: usize, mask: u32, colouring: Option<&[usize]>) -> FinStructure {
    let mut a = FinStructure::new(tau.clone(), colours.to_vec());
    a.add_elements(n);
    for u in 0..n {
        for v in 0..n {
            if mask >> (u * n + v) & 1 == 1 {
                a.add_tuple(0, vec![u, v]).expect("in range");
            }
        }
    }
    if let Some(c) = colouring {
        for (e, &m) in c.iter().enumerate() {
            a.set_colour(e, m).expect("declared colour");
        }
    }
    a
}

/// Windows of `min(3, n)` elements of an `n`-element graph. Every image of
/// a connected pattern on at most three elements lies inside one window, so
/// a property forbidding such patterns can be checked window by window.
pub struct Windows {
    pub n: usize,
    pub width: usize,
    pub sets: Vec<Vec<usize>>,
    lo: Vec<Vec<u16>>,
    hi: Vec<Vec<u16>>,
}

const LO_BITS: usize = 13;

impl Windows {
    pub fn new(n: usize) -> Self {
        let width = n.min(3);
        let sets: Vec<Vec<usize>> = subsets(n, width);
        let bits = n * n;
        let lo_bits = bits.min(LO_BITS);
        let hi_bits = bits - lo_bits;
        let gather = |set: &[usize], chunk: u32, offset: usize| -> u16 {
            let mut p = 0u16;
            for (i, &u) in set.iter().enumerate() {
                for (j, &v) in set.iter().enumerate() {
                    let bit = u * n + v;
                    if bit >= offset && bit - offset < 32 && chunk >> (bit - offset) & 1 == 1 {
                        p |= 1 << (i * width + j);
                    }
                }
            }
            p
        };
        let lo = sets
            .iter()
            .map(|s| (0..1u32 << lo_bits).map(|c| gather(s, c, 0)).collect())
            .collect();
        let hi = sets
            .iter()
            .map(|s| (0..1u32 << hi_bits).map(|c| gather(s, c, lo_bits)).collect())
            .collect();
        Windows { n, width, sets, lo, hi }
    }

    pub fn graphs(&self) -> u32 {
        1u32 << (self.n * self.n)
    }

    /// The edge pattern of window `w` in `mask`, with bit `i * width + j`
    /// for the edge from the window's `i`-th to its `j`-th element.
    #[inline]
    pub fn pattern(&self, w: usize, mask: u32) -> usize {
        (self.lo[w][(mask & ((1 << LO_BITS) - 1)) as usize] | self.hi[w][(mask >> LO_BITS) as usize]) as usize
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Advances `c` as a base-`k` counter, least significant digit first.
pub fn odometer(c: &mut [usize], k: usize) -> bool {
    for d in c.iter_mut() {
        *d += 1;
        if *d < k {
            return true;
        }
        *d = 0;
    }
    false
}

/// For each window pattern and each colouring of the window (base-`k`
/// number, first element least significant), whether the coloured window
/// avoids every obstruction.
pub fn window_freeness(tau: &Signature, colours: &[String], width: usize, obstructions: &[FinStructure]) -> Vec<Vec<bool>> {
    let k = colours.len();
    let local = k.pow(width as u32);
    (0..1u32 << (width * width))
        .map(|p| {
            let mut c = vec![0usize; width];
            let mut row = Vec::with_capacity(local);
            loop {
                row.push(is_obstruction_free(&graph(tau, colours, width, p, Some(&c)), obstructions));
                if !odometer(&mut c, k) {
                    break;
                }
            }
            row
        })
        .collect()
}

/// Per window and pattern, the set of colourings of all `n` elements
/// (bit index in base `k`, element 0 least significant) that are free on
/// that window.
pub fn colouring_masks(win: &Windows, k: usize, free: &[Vec<bool>]) -> Vec<Vec<u32>> {
    let total = k.pow(win.n as u32);
    assert!(total <= 32);
    let digits: Vec<Vec<usize>> = (0..total)
        .map(|mut c| {
            (0..win.n)
                .map(|_| {
                    let d = c % k;
                    c /= k;
                    d
                })
                .collect()
        })
        .collect();
    win.sets
        .iter()
        .map(|set| {
            free.iter()
                .map(|row| {
                    let mut m = 0u32;
                    for (c, d) in digits.iter().enumerate() {
                        let local = set.iter().rev().fold(0, |acc, &e| acc * k + d[e]);
                        if row[local] {
                            m |= 1 << c;
                        }
                    }
                    m
                })
                .collect()
        })
        .collect()
}

/// Second-order semantics of a sentence whose clauses have at most three
/// variables, read off window by window: element values are subsets of the
/// sentence's predicates (bit `i` for the `i`-th), and a window is fine
/// when no clause has a satisfying assignment inside it.
pub fn window_truth(phi: &Sentence, width: usize) -> Vec<Vec<bool>> {
    let k = 1usize << phi.colours().len();
    let local = k.pow(width as u32);
    (0..1usize << (width * width))
        .map(|p| {
            (0..local)
                .map(|v| {
                    let value: Vec<usize> = (0..width).map(|e| v / k.pow(e as u32) % k).collect();
                    phi.clauses().iter().all(|c| !clause_holds_somewhere(phi, c, width, p, &value))
                })
                .collect()
        })
        .collect()
}

fn clause_holds_somewhere(phi: &Sentence, c: &Clause, width: usize, pattern: usize, value: &[usize]) -> bool {
    let mut f = vec![0usize; c.num_vars()];
    loop {
        let atoms = c.atoms().iter().all(|a| pattern >> (f[a.args[0]] * width + f[a.args[1]]) & 1 == 1);
        let literals = c.literals().iter().all(|l| {
            let i = phi.colour_index(&l.colour).expect("declared");
            (value[f[l.var]] >> i & 1 == 1) == l.positive
        });
        if atoms && literals {
            return true;
        }
        if !odometer(&mut f, width) {
            return false;
        }
    }
}

/// One edge mask per isomorphism class of graphs on `n` elements: the
/// masks that are smallest among all their relabellings.
pub fn graph_classes(n: usize) -> Vec<u32> {
    let mut perms = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    permutations(&mut p, 0, &mut perms);
    let relabel = |mask: u32, p: &[usize]| -> u32 {
        let mut out = 0;
        for u in 0..n {
            for v in 0..n {
                if mask >> (u * n + v) & 1 == 1 {
                    out |= 1 << (p[u] * n + p[v]);
                }
            }
        }
        out
    };
    (0..1u32 << (n * n)).filter(|&m| perms.iter().all(|p| relabel(m, p) >= m)).collect()
}

fn permutations(p: &mut Vec<usize>, i: usize, out: &mut Vec<Vec<usize>>) {
    if i == p.len() {
        out.push(p.clone());
        return;
    }
    for j in i..p.len() {
        p.swap(i, j);
        permutations(p, i + 1, out);
        p.swap(i, j);
    }
}
