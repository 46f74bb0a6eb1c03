//! Catalogue files, count reports, checkpoints and the resumable run driver.
//!
//! A catalogue holds one hypergraph per line in the `n e HEX` encoding,
//! sorted as byte strings. A checkpoint is
//!
//! ```text
//! CHECKPOINT v1 n=<n> e_max=<e>
//! <number of processed seeds>
//! <start> <length>
//! ...
//! ```
//!
//! with one line per run of consecutive processed seed indices. The classes
//! found so far are appended to a sidecar file next to it (`<checkpoint>.classes`).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::canonical::{canonicalize, CanonicalForm, ClassSet};
use crate::error::{Error, Result};
use crate::extension::{
    add_complements, bootstrap, classes_from_seed, path_bounds, uses_complements, EnumerateOptions,
    ExtensionOptions, PathBounds,
};
use crate::hypergraph::{triples, Hypergraph, MAX_POINTS};
use crate::interval::OrderStrategy;
use crate::probes::{parse_colouring, verify_partial_colouring};

fn digits_then_bits(a: &Hypergraph, b: &Hypergraph) -> Ordering {
    let key = |g: &Hypergraph| (g.n().to_string(), g.edge_count().to_string());
    key(a).cmp(&key(b)).then_with(|| a.bits().cmp(b.bits()))
}

/// The order of the encoded lines compared as byte strings.
pub fn catalogue_cmp(a: &Hypergraph, b: &Hypergraph) -> Ordering {
    if a.n() == b.n() && a.edge_count() == b.edge_count() {
        a.bits().cmp(b.bits())
    } else {
        digits_then_bits(a, b)
    }
}

pub fn sort_catalogue(graphs: &mut [Hypergraph]) {
    graphs.par_sort_unstable_by(catalogue_cmp);
}

pub fn parse_catalogue(text: &str) -> Result<Vec<Hypergraph>> {
    read_lines(text.as_bytes())
}

fn read_lines<R: BufRead>(reader: R) -> Result<Vec<Hypergraph>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let g = line.parse::<Hypergraph>().map_err(|e| Error::Line {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(g);
    }
    Ok(out)
}

pub fn read_catalogue(path: &Path) -> Result<Vec<Hypergraph>> {
    read_lines(BufReader::new(File::open(path)?))
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

fn write_atomic<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let tmp = temp_path(path);
    let mut w = BufWriter::new(File::create(&tmp)?);
    body(&mut w)?;
    let f = w.into_inner().map_err(|e| e.into_error())?;
    f.sync_all()?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes `graphs`, which must already be in catalogue order.
pub fn write_catalogue(path: &Path, graphs: &[Hypergraph]) -> Result<()> {
    write_atomic(path, |w| {
        for g in graphs {
            writeln!(w, "{g}")?;
        }
        Ok(())
    })
}

/// A canonical hypergraph with its invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogueEntry {
    pub form: CanonicalForm,
    pub edges: usize,
    pub group_order: u64,
    pub orbits: usize,
    pub self_complementary: bool,
}

impl CatalogueEntry {
    pub fn of(g: &Hypergraph) -> Self {
        let c = canonicalize(g);
        let self_complementary =
            2 * g.edge_count() == g.width() && canonicalize(&g.complement()).form == c.form;
        Self {
            form: c.form,
            edges: g.edge_count(),
            group_order: c.aut.order,
            orbits: c.aut.orbit_count,
            self_complementary,
        }
    }
}

/// Class counts per `(n, e)`, reported with complement-inclusive totals.
///
/// Rows list `e <= floor(C(n,3)/2)` unless `full` is set. The total for
/// each `n` is the sum of those rows plus the rows with `e < C(n,3)/2` again,
/// counting each listed class's complement.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CountsReport {
    pub counts: BTreeMap<(usize, usize), u64>,
    pub full: bool,
}

impl CountsReport {
    pub fn from_graphs<'a, I>(graphs: I) -> Self
    where
        I: IntoIterator<Item = &'a Hypergraph>,
    {
        let mut counts = BTreeMap::new();
        for g in graphs {
            *counts.entry((g.n(), g.edge_count())).or_insert(0) += 1;
        }
        Self {
            counts,
            full: false,
        }
    }

    pub fn with_full(mut self, full: bool) -> Self {
        self.full = full;
        self
    }

    pub fn point_counts(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.counts.keys().map(|&(n, _)| n).collect();
        v.dedup();
        v
    }

    /// The listed rows for `n`, ascending in `e`.
    pub fn rows(&self, n: usize) -> Vec<(usize, u64)> {
        let half = triples(n) / 2;
        self.counts
            .range((n, 0)..=(n, usize::MAX))
            .filter(|&(&(_, e), _)| self.full || e <= half)
            .map(|(&(_, e), &c)| (e, c))
            .collect()
    }

    /// `(listed, complements)` for `n`.
    pub fn total_parts(&self, n: usize) -> (u64, u64) {
        let width = triples(n);
        let mut listed = 0;
        let mut complements = 0;
        for (&(_, e), &c) in self.counts.range((n, 0)..=(n, usize::MAX)) {
            if e <= width / 2 {
                listed += c;
            }
            if 2 * e < width {
                complements += c;
            }
        }
        (listed, complements)
    }

    pub fn total(&self, n: usize) -> u64 {
        let (a, b) = self.total_parts(n);
        a + b
    }
}

impl fmt::Display for CountsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n\te\tclasses")?;
        for n in self.point_counts() {
            for (e, c) in self.rows(n) {
                writeln!(f, "{n}\t{e}\t{c}")?;
            }
            let (listed, comp) = self.total_parts(n);
            writeln!(
                f,
                "{n}\ttotal\t{}\t({listed} listed + {comp} complements)",
                listed + comp
            )?;
        }
        Ok(())
    }
}

/// Class counts per `(group order, orbit count)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupTable {
    pub rows: BTreeMap<(u64, usize), u64>,
}

impl GroupTable {
    pub fn from_entries<'a, I>(entries: I) -> Self
    where
        I: IntoIterator<Item = &'a CatalogueEntry>,
    {
        let mut rows = BTreeMap::new();
        for e in entries {
            *rows.entry((e.group_order, e.orbits)).or_insert(0) += 1;
        }
        Self { rows }
    }
}

impl fmt::Display for GroupTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "order\torbits\tclasses")?;
        for (&(order, orbits), &c) in &self.rows {
            writeln!(f, "{order}\t{orbits}\t{c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stats {
    pub counts: CountsReport,
    pub groups: GroupTable,
    pub self_complementary: u64,
}

pub fn stats(graphs: &[Hypergraph], full: bool) -> Stats {
    let entries: Vec<CatalogueEntry> = graphs.par_iter().map(CatalogueEntry::of).collect();
    Stats {
        counts: CountsReport::from_graphs(graphs).with_full(full),
        groups: GroupTable::from_entries(&entries),
        self_complementary: entries.iter().filter(|e| e.self_complementary).count() as u64,
    }
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.counts)?;
        writeln!(f)?;
        write!(f, "{}", self.groups)?;
        writeln!(f)?;
        writeln!(f, "self-complementary\t{}", self.self_complementary)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub passed: usize,
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks a catalogue (every line good) or a colouring file (the partial
/// colouring is good). Catalogue lines start with a digit.
pub fn verify_text(text: &str) -> VerifyReport {
    let mut report = VerifyReport::default();
    let first = text.lines().find(|l| !l.trim().is_empty());
    let is_catalogue = first.map_or(true, |l| {
        l.trim_start().starts_with(|c: char| c.is_ascii_digit())
    });
    if !is_catalogue {
        match parse_colouring(text) {
            Ok(pc) if verify_partial_colouring(&pc) => report.passed = 1,
            Ok(_) => report.failures.push("colouring has a bad quadruple".into()),
            Err(e) => report.failures.push(e.to_string()),
        }
        return report;
    }
    for (i, line) in text.lines().enumerate() {
        match line.parse::<Hypergraph>() {
            Ok(g) if g.is_good() => report.passed += 1,
            Ok(g) => {
                let q = g.violating_quadruples();
                report
                    .failures
                    .push(format!("line {}: not good, quadruple {:?}", i + 1, q[0]));
            }
            Err(e) => report.failures.push(format!("line {}: {e}", i + 1)),
        }
    }
    report
}

/// Seed indices already processed, as read from or written to a checkpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub n: usize,
    pub e_max: usize,
    done: Vec<bool>,
}

impl Checkpoint {
    pub fn new(n: usize, e_max: usize, seeds: usize) -> Self {
        Self {
            n,
            e_max,
            done: vec![false; seeds],
        }
    }

    pub fn header(&self) -> String {
        format!("CHECKPOINT v1 n={} e_max={}", self.n, self.e_max)
    }

    pub fn is_done(&self, i: usize) -> bool {
        self.done[i]
    }

    pub fn mark(&mut self, i: usize) {
        self.done[i] = true;
    }

    pub fn processed(&self) -> usize {
        self.done.iter().filter(|&&d| d).count()
    }

    pub fn runs(&self) -> Vec<(usize, usize)> {
        let mut runs: Vec<(usize, usize)> = Vec::new();
        for (i, &d) in self.done.iter().enumerate() {
            if !d {
                continue;
            }
            match runs.last_mut() {
                Some((s, l)) if *s + *l == i => *l += 1,
                _ => runs.push((i, 1)),
            }
        }
        runs
    }

    pub fn render(&self) -> String {
        let mut s = format!("{}\n{}\n", self.header(), self.processed());
        for (start, len) in self.runs() {
            s.push_str(&format!("{start} {len}\n"));
        }
        s
    }

    /// Parses a checkpoint for a run over `seeds` seeds.
    pub fn parse(text: &str, seeds: usize) -> Result<Self> {
        let corrupt = |m: String| Error::CorruptCheckpoint(m);
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| corrupt("empty file".into()))?;
        let rest = header
            .strip_prefix("CHECKPOINT v1 n=")
            .ok_or_else(|| corrupt(format!("bad header {header:?}")))?;
        let (n, e) = rest
            .split_once(" e_max=")
            .ok_or_else(|| corrupt(format!("bad header {header:?}")))?;
        let num = |s: &str, what: &str| {
            s.parse::<usize>()
                .map_err(|_| corrupt(format!("bad {what} {s:?}")))
        };
        let mut cp = Self::new(num(n, "n")?, num(e, "e_max")?, seeds);
        let count = num(
            lines
                .next()
                .ok_or_else(|| corrupt("missing count".into()))?,
            "count",
        )?;
        let mut next_free = 0;
        let mut total = 0;
        for line in lines {
            let (s, l) = line
                .split_once(' ')
                .ok_or_else(|| corrupt(format!("bad run {line:?}")))?;
            let (s, l) = (num(s, "run start")?, num(l, "run length")?);
            if l == 0 || s < next_free {
                return Err(corrupt(format!("runs not sorted and disjoint at {line:?}")));
            }
            if s + l > seeds {
                return Err(Error::CheckpointMismatch(format!(
                    "run {s}+{l} beyond {seeds} seeds"
                )));
            }
            cp.done[s..s + l].iter_mut().for_each(|d| *d = true);
            next_free = s + l;
            total += l;
        }
        if total != count {
            return Err(corrupt(format!("count {count} but runs cover {total}")));
        }
        Ok(cp)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = self.render();
        write_atomic(path, |w| w.write_all(text.as_bytes()))
    }
}

pub fn sidecar_path(checkpoint: &Path) -> PathBuf {
    let mut name = checkpoint.file_name().unwrap_or_default().to_os_string();
    name.push(".classes");
    checkpoint.with_file_name(name)
}

/// Reads the sidecar. A final line without a newline is the trace of an
/// interrupted append and is dropped; its seeds are not yet marked done.
fn read_sidecar(path: &Path) -> Result<Option<Vec<Hypergraph>>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let complete = match text.rfind('\n') {
        Some(i) => &text[..=i],
        None => "",
    };
    parse_catalogue(complete)
        .map(Some)
        .map_err(|e| Error::CorruptCheckpoint(format!("sidecar: {e}")))
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n: usize,
    pub e_max: Option<usize>,
    pub seeds: Option<PathBuf>,
    pub out: PathBuf,
    pub checkpoint: Option<PathBuf>,
    pub jobs: usize,
    pub order: OrderStrategy,
    pub dedup_threshold: usize,
    /// Seeds per batch; the checkpoint is written after each batch.
    pub batch: usize,
    /// Stop after this many batches without writing the catalogue.
    pub stop_after: Option<usize>,
    pub progress: bool,
}

impl RunConfig {
    pub fn new(n: usize, out: impl Into<PathBuf>) -> Self {
        Self {
            n,
            e_max: None,
            seeds: None,
            out: out.into(),
            checkpoint: None,
            jobs: 1,
            order: OrderStrategy::default(),
            dedup_threshold: 100_000_000,
            batch: 256,
            stop_after: None,
            progress: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(3..=MAX_POINTS).contains(&self.n) {
            return Err(Error::BadPointCount(self.n));
        }
        if self.jobs == 0 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        if self.batch == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        let mut paths = vec![self.out.clone()];
        paths.extend(self.seeds.clone());
        if let Some(c) = &self.checkpoint {
            paths.push(c.clone());
            paths.push(sidecar_path(c));
        }
        for (i, a) in paths.iter().enumerate() {
            if paths[i + 1..].contains(a) {
                return Err(Error::Config(format!("{} used twice", a.display())));
            }
        }
        Ok(())
    }

    fn enumerate_options(&self) -> EnumerateOptions {
        EnumerateOptions {
            extension: ExtensionOptions {
                order: self.order,
                ..ExtensionOptions::default()
            },
            dedup_threshold: self.dedup_threshold,
            bounds: None,
            batch: self.batch,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    /// False when stopped early by [`RunConfig::stop_after`].
    pub completed: bool,
    pub seeds: usize,
    pub classes: usize,
    pub report: CountsReport,
}

struct Plan {
    seeds: Vec<Hypergraph>,
    bounds: PathBounds,
    header_e: usize,
    complements: bool,
}

fn plan(cfg: &RunConfig, opts: &EnumerateOptions) -> Result<Plan> {
    let n = cfg.n;
    match &cfg.seeds {
        Some(path) => {
            let seeds = read_catalogue(path)?;
            let m = seeds.first().map_or(3, Hypergraph::n);
            if let Some(g) = seeds.iter().find(|g| g.n() != m) {
                return Err(Error::Config(format!(
                    "seed file mixes {m}- and {}-point hypergraphs",
                    g.n()
                )));
            }
            if m > n {
                return Err(Error::Config(format!(
                    "seeds have {m} points, target is {n}"
                )));
            }
            let e = cfg.e_max.unwrap_or(triples(n));
            let bounds = path_bounds(n, e, m)?;
            Ok(Plan {
                seeds,
                bounds,
                header_e: e.min(triples(n)),
                complements: false,
            })
        }
        None => {
            let complements = uses_complements(cfg.e_max, opts);
            let searched = if complements {
                triples(n) / 2
            } else {
                cfg.e_max.unwrap_or(triples(n)).min(triples(n))
            };
            let stage = bootstrap(n, Some(searched), opts)?;
            Ok(Plan {
                seeds: stage.seeds,
                bounds: stage.bounds,
                header_e: cfg.e_max.unwrap_or(triples(n)).min(triples(n)),
                complements,
            })
        }
    }
}

/// Enumerates, resuming from and updating the checkpoint if one is set,
/// and writes the sorted catalogue.
pub fn run_enumeration(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| run_in_pool(cfg))
}

fn run_in_pool(cfg: &RunConfig) -> Result<RunOutcome> {
    let opts = cfg.enumerate_options();
    let plan = plan(cfg, &opts)?;
    let total = plan.seeds.len();
    let mut set = ClassSet::new();
    let mut cp = Checkpoint::new(cfg.n, plan.header_e, total);
    let mut sidecar = None;
    if let Some(path) = &cfg.checkpoint {
        let side = sidecar_path(path);
        let mut kept = Vec::new();
        if path.exists() {
            let loaded = Checkpoint::parse(&fs::read_to_string(path)?, total)?;
            if (loaded.n, loaded.e_max) != (cp.n, cp.e_max) {
                return Err(Error::CheckpointMismatch(format!(
                    "checkpoint has {:?}, run needs {:?}",
                    loaded.header(),
                    cp.header()
                )));
            }
            kept = match read_sidecar(&side)? {
                Some(v) => v,
                None if loaded.processed() == 0 => Vec::new(),
                None => {
                    return Err(Error::CorruptCheckpoint(format!(
                        "{} is missing",
                        side.display()
                    )))
                }
            };
            cp = loaded;
        }
        // Rewrite without any partial trailing line, then append.
        write_catalogue(&side, &kept)?;
        set.extend(kept.into_iter().map(CanonicalForm::assume_canonical));
        sidecar = Some(OpenOptions::new().append(true).open(&side)?);
    }

    let pending: Vec<usize> = (0..total).filter(|&i| !cp.is_done(i)).collect();
    let mut done = total - pending.len();
    for (b, chunk) in pending.chunks(cfg.batch).enumerate() {
        if cfg.stop_after == Some(b) {
            return Ok(RunOutcome {
                completed: false,
                seeds: total,
                classes: set.len(),
                report: CountsReport::default(),
            });
        }
        let forms: Vec<Vec<CanonicalForm>> = chunk
            .par_iter()
            .map(|&i| classes_from_seed(&plan.seeds[i], &plan.bounds, &opts.extension))
            .collect::<Result<_>>()?;
        if let (Some(file), Some(path)) = (sidecar.as_mut(), &cfg.checkpoint) {
            let mut w = BufWriter::new(&mut *file);
            for f in forms.iter().flatten() {
                writeln!(w, "{f}")?;
            }
            w.flush()?;
            drop(w);
            file.sync_data()?;
            for &i in chunk {
                cp.mark(i);
            }
            cp.save(path)?;
        }
        for v in forms {
            set.extend(v);
        }
        done += chunk.len();
        if cfg.progress {
            eprintln!("seeds {done}/{total} done");
        }
    }

    let mut classes = set.into_sorted();
    if plan.complements {
        classes = add_complements(classes);
    }
    sort_catalogue(&mut classes);
    write_catalogue(&cfg.out, &classes)?;
    Ok(RunOutcome {
        completed: true,
        seeds: total,
        classes: classes.len(),
        report: CountsReport::from_graphs(&classes),
    })
}
