//! Brute-force check of the discrete extension identities on small carriers.
//!
//! Subsets of an `n`-element carrier are bitmasks, a family of subsets is a
//! bitmask over those, and a monotone function is its table of images. For
//! an approximate set `d` and a set of functions `F`, the extension is
//! `{f(x) | f in F, x in d}` and its range is `[meet, join]` of those images.
//! When `d` contains its own meet and join and `F` contains its pointwise
//! meet and join, that range equals `[min F (meet d), max F (join d)]`;
//! without closure only inclusion holds. The biapproximate form is checked
//! on biintervals `<lo, hi> = { [y, y | hi] : y in [lo & hi, lo] }`, whose
//! range is `<lo, hi>` again.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Largest supported carrier.
const MAX_N: usize = 4;
/// Enumeration limit for one interval of monotone functions.
const MEMBER_CAP: usize = 4096;

type Func = [u16; 1 << MAX_N];

/// How many cases to examine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiscreteCoverage {
    /// Every closed family and monotone function (carriers up to 3).
    Exhaustive,
    /// Random cases from a seeded generator.
    Sampled { cases: usize, seed: u64 },
}

/// Outcome of [`discrete_extension_check`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiscreteReport {
    pub carrier: usize,
    pub lemma_cases: u64,
    pub theorem_cases: u64,
    /// Cases that violated an identity or inclusion.
    pub failures: Vec<String>,
    /// Non-closed cases where the range was strictly larger than the bound.
    pub strict_inclusions: u64,
    /// One such case, for documentation.
    pub example_gap: Option<String>,
}

impl DiscreteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn cases(&self) -> u64 {
        self.lemma_cases + self.theorem_cases
    }
}

struct Carrier {
    n: usize,
    subsets: usize,
    /// Subsets ordered by cardinality.
    order: Vec<u16>,
}

impl Carrier {
    fn new(n: usize) -> Carrier {
        assert!((1..=MAX_N).contains(&n), "carrier size must be in 1..=4");
        let subsets = 1usize << n;
        let mut order: Vec<u16> = (0..subsets as u16).collect();
        order.sort_by_key(|s| s.count_ones());
        Carrier { n, subsets, order }
    }

    fn full(&self) -> u16 {
        (self.subsets - 1) as u16
    }

    #[cfg(test)]
    fn is_monotone(&self, f: &Func) -> bool {
        (0..self.subsets).all(|a| {
            (0..self.n).all(|i| {
                let b = a | (1 << i);
                f[a] & !f[b] == 0
            })
        })
    }

    fn meet(&self, f: &Func, g: &Func) -> Func {
        let mut h = [0; 1 << MAX_N];
        for a in 0..self.subsets {
            h[a] = f[a] & g[a];
        }
        h
    }

    fn join(&self, f: &Func, g: &Func) -> Func {
        let mut h = [0; 1 << MAX_N];
        for a in 0..self.subsets {
            h[a] = f[a] | g[a];
        }
        h
    }

    fn le(&self, f: &Func, g: &Func) -> bool {
        (0..self.subsets).all(|a| f[a] & !g[a] == 0)
    }

    /// Every monotone function (only sensible for `n <= 3`).
    fn monotone_functions(&self) -> Vec<Func> {
        // up-closed families of subsets are the monotone predicates
        let upsets: Vec<u32> = (0..1u64 << self.subsets)
            .map(|u| u as u32)
            .filter(|&u| {
                (0..self.subsets)
                    .all(|a| u >> a & 1 == 0 || (0..self.n).all(|i| u >> (a | 1 << i) & 1 == 1))
            })
            .collect();
        let mut out = vec![[0u16; 1 << MAX_N]];
        for bit in 0..self.n {
            out = out
                .iter()
                .flat_map(|f| {
                    upsets.iter().map(move |&u| {
                        let mut g = *f;
                        for (a, v) in g.iter_mut().enumerate().take(self.subsets) {
                            if u >> a & 1 == 1 {
                                *v |= 1 << bit;
                            }
                        }
                        g
                    })
                })
                .collect();
        }
        out
    }

    /// Monotone functions `h` with `lo <= h <= hi`, or `None` past the cap.
    fn interval_members(&self, lo: &Func, hi: &Func, cap: usize) -> Option<Vec<Func>> {
        fn go(
            c: &Carrier,
            k: usize,
            h: &mut Func,
            lo: &Func,
            hi: &Func,
            out: &mut Vec<Func>,
            cap: usize,
        ) -> bool {
            if k == c.subsets {
                out.push(*h);
                return out.len() <= cap;
            }
            let a = c.order[k] as usize;
            let need = (0..c.n)
                .filter(|i| a >> i & 1 == 1)
                .fold(lo[a], |acc, i| acc | h[a & !(1 << i)]);
            if need & !hi[a] != 0 {
                return true;
            }
            let free = hi[a] & !need;
            let mut s = free;
            loop {
                h[a] = need | s;
                if !go(c, k + 1, h, lo, hi, out, cap) {
                    return false;
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & free;
            }
            true
        }
        let mut out = Vec::new();
        let mut h = [0; 1 << MAX_N];
        go(self, 0, &mut h, lo, hi, &mut out, cap).then_some(out)
    }

    fn members(&self, family: u32) -> impl Iterator<Item = u16> + '_ {
        (0..self.subsets as u16).filter(move |&s| family >> s & 1 == 1)
    }

    fn family_meet(&self, family: u32) -> u16 {
        self.members(family).fold(self.full(), |a, s| a & s)
    }

    fn family_join(&self, family: u32) -> u16 {
        self.members(family).fold(0, |a, s| a | s)
    }

    /// Range `(meet, join)` of the extension of `fs` at `family`.
    fn extension_range(&self, fs: &[Func], family: u32) -> (u16, u16) {
        let mut lo = self.full();
        let mut hi = 0;
        for f in fs {
            for x in self.members(family) {
                lo &= f[x as usize];
                hi |= f[x as usize];
            }
        }
        (lo, hi)
    }

    /// Subsets between `lo` and `hi` as a family.
    fn set_interval(&self, lo: u16, hi: u16) -> u32 {
        self.members(u32::MAX >> (32 - self.subsets))
            .filter(|&s| lo & !s == 0 && s & !hi == 0)
            .fold(0, |acc, s| acc | 1 << s)
    }

    fn fmt_set(&self, s: u16) -> String {
        let items: Vec<String> = (0..self.n)
            .filter(|i| s >> i & 1 == 1)
            .map(|i| i.to_string())
            .collect();
        format!("{{{}}}", items.join(","))
    }

    fn fmt_family(&self, family: u32) -> String {
        let items: Vec<String> = self.members(family).map(|s| self.fmt_set(s)).collect();
        format!("{{{}}}", items.join(","))
    }

    fn fmt_func(&self, f: &Func) -> String {
        let items: Vec<String> = f[..self.subsets]
            .iter()
            .enumerate()
            .map(|(a, &v)| format!("{}->{}", self.fmt_set(a as u16), self.fmt_set(v)))
            .collect();
        format!("[{}]", items.join(" "))
    }

    /// Checks one approximate case. Returns an error message on failure and
    /// whether the range was strictly wider than the closure bound.
    fn lemma_case(&self, fs: &[Func], family: u32) -> Result<bool, String> {
        let f_lo = fs[1..].iter().fold(fs[0], |a, f| self.meet(&a, f));
        let f_hi = fs[1..].iter().fold(fs[0], |a, f| self.join(&a, f));
        let (d_lo, d_hi) = (self.family_meet(family), self.family_join(family));
        let (lo, hi) = self.extension_range(fs, family);
        let (blo, bhi) = (f_lo[d_lo as usize], f_hi[d_hi as usize]);
        let describe = || {
            format!(
                "F={} d={}: range [{}, {}], bound [{}, {}]",
                fs.iter()
                    .map(|f| self.fmt_func(f))
                    .collect::<Vec<_>>()
                    .join(" "),
                self.fmt_family(family),
                self.fmt_set(lo),
                self.fmt_set(hi),
                self.fmt_set(blo),
                self.fmt_set(bhi)
            )
        };
        if blo & !lo != 0 || hi & !bhi != 0 {
            return Err(format!("inclusion fails: {}", describe()));
        }
        let closed = family >> d_lo & 1 == 1
            && family >> d_hi & 1 == 1
            && fs.contains(&f_lo)
            && fs.contains(&f_hi);
        let strict = (lo, hi) != (blo, bhi);
        if closed && strict {
            return Err(format!("closed case differs: {}", describe()));
        }
        Ok(strict)
    }

    /// Checks the biapproximate identity for `<x_lo, x_hi>` and
    /// `<f_lo, f_hi>`. `None` when the function biinterval is too large.
    fn theorem_case(&self, x: (u16, u16), f: (&Func, &Func)) -> Option<Result<(), String>> {
        let (x_lo, x_hi) = x;
        let (f_lo, f_hi) = f;
        let ys: Vec<u16> = self.members(self.set_interval(x_lo & x_hi, x_lo)).collect();
        let gs = self.interval_members(&self.meet(f_lo, f_hi), f_lo, MEMBER_CAP)?;
        let mut approx_funcs = Vec::with_capacity(gs.len());
        for g in &gs {
            approx_funcs.push(self.interval_members(g, &self.join(g, f_hi), MEMBER_CAP)?);
        }
        let mut lower = 0u16;
        let mut upper = self.full();
        let mut set_lower = 0u16;
        let mut set_upper = self.full();
        let mut fn_lower = [0u16; 1 << MAX_N];
        let mut fn_upper = [self.full(); 1 << MAX_N];
        for y in &ys {
            let family = self.set_interval(*y, y | x_hi);
            set_lower |= self.family_meet(family);
            set_upper &= self.family_join(family);
            for fs in &approx_funcs {
                let (lo, hi) = self.extension_range(fs, family);
                lower |= lo;
                upper &= hi;
            }
        }
        for fs in &approx_funcs {
            let mn = fs[1..].iter().fold(fs[0], |a, f| self.meet(&a, f));
            let mx = fs[1..].iter().fold(fs[0], |a, f| self.join(&a, f));
            fn_lower = self.join(&fn_lower, &mn);
            fn_upper = self.meet(&fn_upper, &mx);
        }
        let expect = (f_lo[x_lo as usize], f_hi[x_hi as usize]);
        let ok = (set_lower, set_upper) == (x_lo, x_hi)
            && fn_lower[..self.subsets] == f_lo[..self.subsets]
            && fn_upper[..self.subsets] == f_hi[..self.subsets]
            && (lower, upper) == expect;
        Some(if ok {
            Ok(())
        } else {
            Err(format!(
                "biinterval <{}, {}> with <{}, {}>: range <{}, {}>, expected <{}, {}>",
                self.fmt_set(x_lo),
                self.fmt_set(x_hi),
                self.fmt_func(f_lo),
                self.fmt_func(f_hi),
                self.fmt_set(lower),
                self.fmt_set(upper),
                self.fmt_set(expect.0),
                self.fmt_set(expect.1)
            ))
        })
    }

    /// Random monotone function; `sparse` keeps the up-sets small.
    fn random_monotone(&self, rng: &mut StdRng, sparse: bool) -> Func {
        let mut f = [0u16; 1 << MAX_N];
        for bit in 0..self.n {
            let gens: Vec<u16> = (0..rng.random_range(0..=3))
                .map(|_| {
                    let mut g = rng.random_range(0..self.subsets as u16);
                    if sparse {
                        g |= rng.random_range(0..self.subsets as u16);
                    }
                    g
                })
                .collect();
            for (a, v) in f.iter_mut().enumerate().take(self.subsets) {
                if gens.iter().any(|&g| g & !(a as u16) == 0) {
                    *v |= 1 << bit;
                }
            }
        }
        f
    }

    fn random_family(&self, rng: &mut StdRng, closed: bool) -> u32 {
        let mut fam = 0u32;
        while fam == 0 {
            fam = rng.random::<u32>() & (u32::MAX >> (32 - self.subsets));
        }
        if closed {
            fam |= 1 << self.family_meet(fam) | 1 << self.family_join(fam);
        }
        fam
    }
}

struct Tally<'a> {
    carrier: &'a Carrier,
    report: DiscreteReport,
}

impl Tally<'_> {
    fn lemma(&mut self, fs: &[Func], family: u32) {
        self.report.lemma_cases += 1;
        match self.carrier.lemma_case(fs, family) {
            Ok(true) => {
                self.report.strict_inclusions += 1;
                if self.report.example_gap.is_none() {
                    let (lo, hi) = self.carrier.extension_range(fs, family);
                    self.report.example_gap = Some(format!(
                        "d={} with F={} has range [{}, {}]",
                        self.carrier.fmt_family(family),
                        self.carrier.fmt_func(&fs[0]),
                        self.carrier.fmt_set(lo),
                        self.carrier.fmt_set(hi)
                    ));
                }
            }
            Ok(false) => {}
            Err(e) => self.fail(e),
        }
    }

    /// Returns false when the case was too large to enumerate.
    fn theorem(&mut self, x: (u16, u16), f: (&Func, &Func)) -> bool {
        match self.carrier.theorem_case(x, f) {
            None => false,
            Some(r) => {
                self.report.theorem_cases += 1;
                if let Err(e) = r {
                    self.fail(e);
                }
                true
            }
        }
    }

    fn fail(&mut self, e: String) {
        if self.report.failures.len() < 10 {
            self.report.failures.push(e);
        }
    }
}

/// Checks both extension identities on an `n`-element carrier.
///
/// Exhaustive coverage (for `n <= 3`) runs every nonempty family against
/// every monotone function, every biinterval `<lo, hi>` against every
/// deterministic function, and for `n <= 2` every pair of functions as both
/// an interval family and a biinterval. Sampled coverage draws random
/// families, function intervals and biintervals.
pub fn discrete_extension_check(n: usize, coverage: DiscreteCoverage) -> DiscreteReport {
    let carrier = Carrier::new(n);
    let mut t = Tally {
        carrier: &carrier,
        report: DiscreteReport {
            carrier: n,
            ..DiscreteReport::default()
        },
    };
    let all_families = u32::MAX >> (32 - carrier.subsets);
    let sets = carrier.subsets as u16;
    match coverage {
        DiscreteCoverage::Exhaustive => {
            assert!(
                n <= 3,
                "exhaustive coverage is limited to carriers of size 3"
            );
            let funcs = carrier.monotone_functions();
            for family in 1..=all_families {
                for f in &funcs {
                    t.lemma(std::slice::from_ref(f), family);
                }
            }
            for x_lo in 0..sets {
                for x_hi in 0..sets {
                    for f in &funcs {
                        t.theorem((x_lo, x_hi), (f, f));
                    }
                }
            }
            if n <= 2 {
                for f in &funcs {
                    for g in &funcs {
                        if carrier.le(f, g) {
                            let fs = carrier.interval_members(f, g, usize::MAX).unwrap();
                            for family in 1..=all_families {
                                t.lemma(&fs, family);
                            }
                        }
                        for family in 1..=all_families {
                            t.lemma(&[*f, *g], family);
                        }
                        for x_lo in 0..sets {
                            for x_hi in 0..sets {
                                t.theorem((x_lo, x_hi), (f, g));
                            }
                        }
                    }
                }
            }
        }
        DiscreteCoverage::Sampled { cases, seed } => {
            let mut rng = StdRng::seed_from_u64(seed);
            let mut done = 0;
            while done < cases {
                let closed = rng.random_bool(0.5);
                let family = carrier.random_family(&mut rng, closed);
                let base = carrier.random_monotone(&mut rng, false);
                let fs = if closed {
                    let top = carrier.join(&base, &carrier.random_monotone(&mut rng, true));
                    match carrier.interval_members(&base, &top, MEMBER_CAP) {
                        Some(fs) => fs,
                        None => continue,
                    }
                } else {
                    (0..rng.random_range(1..=3))
                        .map(|_| carrier.random_monotone(&mut rng, false))
                        .collect()
                };
                t.lemma(&fs, family);

                let x = (rng.random_range(0..sets), rng.random_range(0..sets));
                let f_lo = carrier.join(&base, &carrier.random_monotone(&mut rng, true));
                let f_hi = carrier.join(&base, &carrier.random_monotone(&mut rng, true));
                if t.theorem(x, (&f_lo, &f_hi)) {
                    done += 1;
                }
            }
        }
    }
    t.report
}
