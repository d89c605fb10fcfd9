//! Command execution. Every command produces a [`Report`]; failures before a
//! verdict can be reached map to sysexits-style codes.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde_json::json;

use coarsekit_core::colimit::{
    colimit_star, validate_system, ColimitError, FilteredSystem, PieceSpec,
};
use coarsekit_core::corpus::{
    gen_c0, gen_disjoint_union, gen_random_system, gen_unit_interval, path_metric, Corpus,
    RandomCaps,
};
use coarsekit_core::invariants::{
    amenability_lift, amenability_verify, apc_probe, apc_verify, asdim_lift, asdim_search,
    asdim_verify, exactness_lift, exactness_verify, metrizability_generator_check,
    metrizability_merge, pinch_lift, pinch_verify, property_a_lift, property_a_verify, ApcOutcome,
    ApcTarget, GeneratorReport, LiftError, MergeError, SearchError, SearchMode, DEFAULT_TOLERANCE,
};
use coarsekit_core::maps::{
    bornologous_check, close_check, slowly_oscillating_search, slowly_oscillating_verify,
    GroundedMap, MetricTarget, OscillationRejection,
};
use coarsekit_core::{Family, Rational, ScaledSpace, Verification};

use crate::args::{
    CheckArgs, Cli, Command, CorpusArgs, CorpusKind, Format, InputArgs, Invariant, LiftArgs,
    MapCheck, Mode, Probe,
};
use crate::doc::{
    emit_document, family_from_ids, ids_of_family, ids_of_subset, parse_document, parse_rational,
    rational_string, subset_from_ids, DocError, Document, FamilyDoc, GeneratorSet, InputDigest,
    InputRef, LevelRef, MapDoc, Members, MetricDoc, MetrizabilityDoc, OscillationDoc, SpaceDoc,
    SystemDoc, Target, Verdict, Witness,
};
use crate::report::{digest, Report};
use crate::witness::{self, Placement};

pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;
pub const EXIT_NOINPUT: u8 = 66;
pub const EXIT_CANTCREAT: u8 = 73;

/// Environment variable overriding the pinch tolerance.
pub const PINCH_TOL_VAR: &str = "COARSEKIT_PINCH_TOL";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    NoInput(String),
    CantCreate(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::NoInput(_) => EXIT_NOINPUT,
            Failure::CantCreate(_) => EXIT_CANTCREAT,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::NoInput(m) | Failure::CantCreate(m) => {
                m
            }
        }
    }
}

type Result<T> = std::result::Result<T, Failure>;

/// Runs the tool on `args` (program name first). `pinch_tol` is the value of
/// [`PINCH_TOL_VAR`], if set.
pub fn run<I, T>(args: I, pinch_tol: Option<String>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let mut ctx = Ctx {
        inputs: Vec::new(),
        pinch_tol,
    };
    match ctx.execute(&cli.command) {
        Ok(mut report) => {
            report.inputs = ctx.inputs;
            let stdout = match cli.format {
                Format::Text => report.text(),
                Format::Structured => report.structured(),
            };
            Outcome {
                code: report.verdict.exit_code(),
                stdout,
                stderr: String::new(),
            }
        }
        Err(f) => Outcome {
            code: f.code(),
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message()),
        },
    }
}

struct Ctx {
    inputs: Vec<InputDigest>,
    pinch_tol: Option<String>,
}

fn data_error(role: &str, path: &Path, e: DocError) -> Failure {
    Failure::Data(format!("{role} `{}`: {e}", path.display()))
}

fn write_doc(path: &Path, doc: &Document) -> Result<()> {
    fs::write(path, emit_document(doc))
        .map_err(|e| Failure::CantCreate(format!("`{}`: {e}", path.display())))
}

fn verdict_of(v: &Verification) -> Verdict {
    if v.is_verified() {
        Verdict::Verified
    } else {
        Verdict::Refuted
    }
}

fn level_ref(piece: Option<String>, level: usize) -> LevelRef {
    LevelRef { piece, level }
}

impl Ctx {
    fn read(&mut self, role: &str, path: &Path) -> Result<String> {
        let bytes = fs::read(path)
            .map_err(|e| Failure::NoInput(format!("{role} `{}`: {e}", path.display())))?;
        self.inputs
            .push(digest(role, &path.display().to_string(), &bytes));
        String::from_utf8(bytes)
            .map_err(|_| Failure::Data(format!("{role} `{}`: not UTF-8", path.display())))
    }

    fn load(&mut self, role: &str, path: &Path) -> Result<Document> {
        let text = self.read(role, path)?;
        parse_document(&text).map_err(|e| data_error(role, path, e))
    }

    fn wrong_kind(role: &str, path: &Path, want: &str, got: &Document) -> Failure {
        Failure::Data(format!(
            "{role} `{}`: expected {want}, got a `{}` document",
            path.display(),
            got.kind()
        ))
    }

    fn target(&mut self, role: &str, path: &Path) -> Result<Target> {
        match self.load(role, path)? {
            Document::Space(d) => d
                .build()
                .map(Target::Space)
                .map_err(|e| data_error(role, path, e)),
            Document::System(d) => d
                .build()
                .map(Target::System)
                .map_err(|e| data_error(role, path, e)),
            other => Err(Self::wrong_kind(role, path, "a space or system", &other)),
        }
    }

    fn space(&mut self, role: &str, path: &Path) -> Result<ScaledSpace> {
        match self.load(role, path)? {
            Document::Space(d) => d.build().map_err(|e| data_error(role, path, e)),
            other => Err(Self::wrong_kind(role, path, "a space", &other)),
        }
    }

    fn system(&mut self, role: &str, path: &Path) -> Result<FilteredSystem> {
        match self.load(role, path)? {
            Document::System(d) => d.build().map_err(|e| data_error(role, path, e)),
            other => Err(Self::wrong_kind(role, path, "a system", &other)),
        }
    }

    fn map(&mut self, role: &str, path: &Path) -> Result<GroundedMap> {
        match self.load(role, path)? {
            Document::Map(d) => d.build().map_err(|e| data_error(role, path, e)),
            other => Err(Self::wrong_kind(role, path, "a map", &other)),
        }
    }

    fn metric(&mut self, role: &str, path: &Path) -> Result<MetricTarget> {
        match self.load(role, path)? {
            Document::Metric(d) => d.build().map_err(|e| data_error(role, path, e)),
            other => Err(Self::wrong_kind(role, path, "a metric", &other)),
        }
    }

    fn members(&mut self, role: &str, path: &Path) -> Result<Members> {
        match self.load(role, path)? {
            Document::Family(d) => Ok(d.members),
            other => Err(Self::wrong_kind(role, path, "a family", &other)),
        }
    }

    fn family(&mut self, role: &str, path: &Path, t: &Target) -> Result<Family> {
        let m = self.members(role, path)?;
        family_from_ids(t.points(), "members", &m).map_err(|e| data_error(role, path, e))
    }

    fn witness(&mut self, path: &Path, invariant: &str) -> Result<Witness> {
        match self.load("witness", path)? {
            Document::Witness(w) if w.invariant() == invariant => Ok(w),
            other => Err(Self::wrong_kind(
                "witness",
                path,
                &format!("a `witness:{invariant}` document"),
                &other,
            )),
        }
    }

    fn tolerance(&self, flag: Option<f64>) -> Result<f64> {
        let tol = match (flag, &self.pinch_tol) {
            (Some(t), _) => t,
            (None, Some(s)) => s
                .trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("{PINCH_TOL_VAR}=`{s}` is not a number")))?,
            (None, None) => DEFAULT_TOLERANCE,
        };
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(Failure::Usage(format!(
                "tolerance {tol} must be finite and non-negative"
            )));
        }
        Ok(tol)
    }

    fn execute(&mut self, cmd: &Command) -> Result<Report> {
        match cmd {
            Command::Validate { doc } => self.validate(doc),
            Command::Bounded { target, family } => self.bounded(target, family),
            Command::Star {
                target,
                f,
                g,
                output,
            } => self.star(target, f, g, output.as_deref()),
            Command::Check(a) => self.check(a),
            Command::Lift(a) => self.lift(a),
            Command::MapCheck(m) => self.map_check(m),
            Command::Corpus(a) => corpus(a),
            Command::Probe(Probe::Apc {
                system,
                prefix_len,
                budget,
            }) => self.probe_apc(system, *prefix_len, *budget),
        }
    }

    // ---- validate, bounded, star ----

    fn validate(&mut self, path: &Path) -> Result<Report> {
        let doc = self.load("document", path)?;
        let kind = doc.kind();
        let built = match &doc {
            Document::Space(d) => d
                .build()
                .map(|s| format!("{} points, depth {}", s.len(), s.depth())),
            Document::System(d) => d
                .build()
                .map(|s| format!("{} points, {} pieces", s.ambient().len(), s.pieces().len())),
            Document::Map(d) => d
                .build()
                .map(|m| format!("{} points to {}", m.domain().len(), m.codomain().len())),
            Document::Metric(d) => d.build().map(|m| format!("{} points", m.points().len())),
            Document::Family(d) => Ok(format!("{} members", d.members.len())),
            Document::Witness(_) => {
                Ok("well formed; check it against a target with `check`".into())
            }
            Document::Report(d) => Ok(format!("verdict {:?}", d.verdict)),
        };
        let mut r = Report::new("validate", Verdict::Verified);
        match built {
            Ok(detail) => {
                r.clause("valid", true, detail);
            }
            Err(e) => {
                r.verdict = Verdict::Refuted;
                r.clause("valid", false, e.to_string());
            }
        }
        r.data = Some(json!({ "kind": kind }));
        Ok(r)
    }

    fn bounded(&mut self, target: &Path, family: &Path) -> Result<Report> {
        let t = self.target("target", target)?;
        let f = self.family("family", family, &t)?;
        let mut r = Report::new("bounded", Verdict::Verified);
        match t.structure().bounded(&f) {
            Some(b) => {
                let lr = t.bound_ref(&b);
                r.clause("bounded", true, format!("certificate {}", describe(&lr)));
                r.data = Some(json!({ "bound": lr }));
            }
            None => {
                r.verdict = Verdict::UndecidedAtTruncation;
                r.clause(
                    "bounded",
                    false,
                    "no level of this truncation bounds the family",
                );
            }
        }
        Ok(r)
    }

    fn star(&mut self, target: &Path, f: &Path, g: &Path, output: Option<&Path>) -> Result<Report> {
        let t = self.target("target", target)?;
        let ff = self.family("f", f, &t)?;
        let gf = self.family("g", g, &t)?;
        let star = gf.star_each(&ff);
        let mut r = Report::new("star", Verdict::Verified);
        let constructive = match &t {
            Target::System(sys) => match colimit_star(sys, &ff, &gf) {
                Ok((_, cert)) => Ok(coarsekit_core::Bound::from(cert)),
                Err(ColimitError::Family(e)) => return Err(Failure::Data(e.to_string())),
                Err(e) => Err(e.to_string()),
            },
            Target::Space(s) => match (s.is_bounded(&ff), s.is_bounded(&gf)) {
                (Some(a), Some(b)) => s
                    .star_level(a, b)
                    .map(coarsekit_core::Bound::Level)
                    .ok_or_else(|| {
                        format!(
                            "undecided at truncation: {a} and {b} exceed the star depth {}",
                            s.star_depth()
                        )
                    }),
                (a, _) => Err(format!(
                    "the {} family is not bounded within this truncation",
                    if a.is_none() { "first" } else { "second" }
                )),
            },
        };
        let bound = match constructive {
            Ok(b) => {
                r.clause(
                    "certificate",
                    true,
                    format!("constructed: {}", describe(&t.bound_ref(&b))),
                );
                Some(b)
            }
            Err(why) => {
                r.note(why);
                match t.structure().bounded(&star) {
                    Some(b) => {
                        r.clause(
                            "certificate",
                            true,
                            format!("found by search: {}", describe(&t.bound_ref(&b))),
                        );
                        Some(b)
                    }
                    None => {
                        r.verdict = Verdict::UndecidedAtTruncation;
                        r.clause(
                            "certificate",
                            false,
                            "no level of this truncation bounds the star",
                        );
                        None
                    }
                }
            }
        };
        r.data = Some(json!({
            "star": ids_of_family(t.points(), &star),
            "bound": bound.map(|b| t.bound_ref(&b)),
        }));
        if let Some(path) = output {
            write_doc(path, &Document::Family(FamilyDoc::new(t.points(), &star)))?;
            r.note(format!("wrote {}", path.display()));
        }
        Ok(r)
    }

    // ---- check ----

    /// The input family: command line first, then the witness, then level 1
    /// of a space.
    fn resolve_input(
        &mut self,
        t: &Target,
        on: &InputArgs,
        own: InputRef<'_>,
    ) -> Result<(Family, Placement, Vec<String>)> {
        let mut notes = Vec::new();
        if let Some(path) = &on.input {
            let members = self.members("input", path)?;
            let f = family_from_ids(t.points(), "members", &members)
                .map_err(|e| data_error("input", path, e))?;
            return Ok((
                f,
                Placement {
                    level_in: None,
                    input: Some(members),
                },
                notes,
            ));
        }
        let cli_level = on.level.map(|l| level_ref(on.piece.clone(), l));
        let on_ref = match &cli_level {
            Some(lr) => InputRef {
                level_in: Some(lr),
                input: None,
            },
            None => own,
        };
        let (f, note) = t
            .input(on_ref)
            .map_err(|e| Failure::Usage(format!("input family: {e}")))?;
        notes.extend(note);
        let placement = Placement {
            level_in: on_ref
                .level_in
                .cloned()
                .or_else(|| on_ref.input.is_none().then(|| level_ref(None, 1))),
            input: on_ref.input.cloned(),
        };
        Ok((f, placement, notes))
    }

    fn check(&mut self, a: &CheckArgs) -> Result<Report> {
        let t = self.target("target", &a.target)?;
        let command = format!("check {}", a.invariant.name());
        if a.search {
            return match a.invariant {
                Invariant::Asdim => self.asdim_search(&t, a, command),
                Invariant::Apc => apc_search(&t, a, command),
                Invariant::Metrizability => Ok(metrizability_search(&t, command)),
                other => Err(Failure::Usage(format!(
                    "no search for {}; pass --witness",
                    other.name()
                ))),
            };
        }
        let path = a
            .witness
            .as_deref()
            .expect("clap requires --witness without --search");
        let w = self.witness(path, a.invariant.name())?;
        let bad = |e: DocError| data_error("witness", path, e);
        let s = t.structure();
        let mut r = match w {
            Witness::Asdim(d) => {
                let n = a.n.or(d.n).ok_or_else(|| {
                    Failure::Usage("asdim needs --n or `n` in the witness".into())
                })?;
                let (input, _, notes) = self.resolve_input(&t, &a.on, d.on())?;
                let w = witness::asdim_from(&t, &d).map_err(bad)?;
                let mut r = Report::verification(&command, &asdim_verify(s, n, &input, &w));
                r.notes = notes;
                r.note(format!("n = {n}"));
                r
            }
            Witness::Exactness(d) => {
                let (input, _, notes) = self.resolve_input(&t, &a.on, d.on())?;
                let w = witness::exactness_from(&t, &d).map_err(bad)?;
                let mut r = Report::verification(
                    &command,
                    &exactness_verify(s, &input, w.eps, &w.pou, &w.support_bound),
                );
                r.notes = notes;
                r
            }
            Witness::Pinch(d) => {
                let tol = self.tolerance(a.tol)?;
                let (input, _, notes) = self.resolve_input(&t, &a.on, d.on())?;
                let w = witness::pinch_from(&t, &d).map_err(bad)?;
                let mut r = Report::verification(&command, &pinch_verify(s, &input, &w, tol));
                r.notes = notes;
                r.note(format!("tolerance {tol:e}"));
                r
            }
            Witness::Amenability(d) => {
                let (input, _, notes) = self.resolve_input(&t, &a.on, d.on())?;
                let w = witness::amenability_from(&t, &d).map_err(bad)?;
                let mut r = Report::verification(&command, &amenability_verify(s, &input, &w));
                r.notes = notes;
                r
            }
            Witness::PropertyA(d) => {
                let (input, _, notes) = self.resolve_input(&t, &a.on, d.on())?;
                let w = witness::property_a_from(&t, &d).map_err(bad)?;
                let mut r = Report::verification(&command, &property_a_verify(s, &input, &w));
                r.notes = notes;
                r
            }
            Witness::Apc(d) => {
                let (w, prefix) = witness::apc_from(&t, &d).map_err(bad)?;
                Report::verification(&command, &apc_verify(s, &prefix, &w))
            }
            Witness::Metrizability(d) => {
                let families = match d.sets.as_slice() {
                    [GeneratorSet { piece: None, families }] => families
                        .iter()
                        .enumerate()
                        .map(|(i, f)| family_from_ids(t.points(), &format!("sets[0].families[{i}]"), f))
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(bad)?,
                    _ => {
                        return Err(Failure::Usage(
                            "check takes one generating set without a piece; per-piece sets are merged by `lift`".into(),
                        ))
                    }
                };
                let report = metrizability_generator_check(&families);
                let mut r = Report::new(&command, Verdict::Verified);
                generator_clauses(&mut r, &report);
                if !report.passes() {
                    r.verdict = Verdict::Refuted;
                }
                r
            }
            Witness::SlowlyOscillating(_) => unreachable!("not an `Invariant` value"),
        };
        r.command = command;
        Ok(r)
    }

    fn asdim_search(&mut self, t: &Target, a: &CheckArgs, command: String) -> Result<Report> {
        let n =
            a.n.ok_or_else(|| Failure::Usage("asdim search needs --n".into()))?;
        let (input, placement, notes) = self.resolve_input(t, &a.on, InputRef::default())?;
        let mode = match a.mode {
            Mode::Exhaustive => SearchMode::Exhaustive,
            Mode::Greedy => SearchMode::Greedy,
        };
        let found = match asdim_search(t.structure(), n, &input, mode) {
            Ok(found) => found,
            Err(e @ SearchError::CapExceeded { .. }) => return Err(Failure::Usage(e.to_string())),
            Err(e) => return Err(Failure::Data(e.to_string())),
        };
        let mut r = Report::new(command, Verdict::Verified);
        r.notes = notes;
        match found.witness {
            Some(w) => {
                let v = asdim_verify(t.structure(), n, &input, &w);
                r.absorb("", &v);
                r.verdict = verdict_of(&v);
                let doc = Document::Witness(Witness::Asdim(witness::asdim_to(t, placement, n, &w)));
                r.data = Some(crate::doc::to_value(&doc));
                if let Some(path) = &a.output {
                    write_doc(path, &doc)?;
                    r.note(format!("wrote {}", path.display()));
                }
            }
            None if found.exhaustive => {
                r.verdict = Verdict::Refuted;
                r.clause(
                    "search",
                    false,
                    format!(
                        "no coarsening of multiplicity at most {} is bounded in this truncation",
                        n + 1
                    ),
                );
            }
            None => {
                r.verdict = Verdict::UndecidedAtTruncation;
                r.clause(
                    "search",
                    false,
                    "greedy search found no witness; this says nothing",
                );
            }
        }
        Ok(r)
    }

    // ---- lift ----

    fn lift(&mut self, a: &LiftArgs) -> Result<Report> {
        let sys = self.system("system", &a.system)?;
        let command = format!("lift {}", a.invariant.name());
        if a.invariant == Invariant::Metrizability {
            let w = self.witness(&a.witness, "metrizability")?;
            let Witness::Metrizability(d) = w else {
                unreachable!()
            };
            let mut r = merge(&sys, &d).map_err(|e| data_error("witness", &a.witness, e))?;
            r.command = command;
            return Ok(r);
        }
        if a.invariant == Invariant::Apc {
            return Err(Failure::Usage(
                "apc has no lifter; search the colimit with `probe apc`".into(),
            ));
        }
        let name = a
            .from
            .as_deref()
            .ok_or_else(|| Failure::Usage("lift needs --from <piece>".into()))?;
        let s = sys
            .piece_by_name(name)
            .ok_or_else(|| Failure::Usage(format!("no piece named `{name}`")))?;
        let piece_t = Target::Space(sys.piece(s).space().clone());
        let w = self.witness(&a.witness, a.invariant.name())?;
        let bad = |e: DocError| data_error("witness", &a.witness, e);

        // the colimit input: an ambient family, or a piece input extended by
        // singletons
        let own = match &w {
            Witness::Asdim(d) => d.on(),
            Witness::Exactness(d) => d.on(),
            Witness::Pinch(d) => d.on(),
            Witness::Amenability(d) => d.on(),
            Witness::PropertyA(d) => d.on(),
            _ => unreachable!("handled above"),
        };
        let (u, placement) = match (&a.input, a.level) {
            (Some(path), _) => {
                let members = self.members("input", path)?;
                let u = family_from_ids(sys.ambient(), "members", &members)
                    .map_err(|e| data_error("input", path, e))?;
                (
                    u,
                    Placement {
                        level_in: None,
                        input: Some(members),
                    },
                )
            }
            (None, level) => {
                let cli = level.map(|l| level_ref(None, l));
                let on = match &cli {
                    Some(lr) => InputRef {
                        level_in: Some(lr),
                        input: None,
                    },
                    None => own,
                };
                let (local, _) = piece_t
                    .input(on)
                    .map_err(|e| Failure::Usage(format!("input family: {e}")))?;
                let u = sys.extend_from_piece(s, &local);
                let placement = match (on.level_in, on.input) {
                    (_, Some(_)) => Placement {
                        level_in: None,
                        input: Some(ids_of_family(sys.ambient(), &u)),
                    },
                    (l, None) => Placement {
                        level_in: Some(level_ref(Some(name.to_string()), l.map_or(1, |l| l.level))),
                        input: None,
                    },
                };
                (u, placement)
            }
        };
        let sys_t = Target::System(sys);
        let Target::System(sys) = &sys_t else {
            unreachable!()
        };
        let lifted: std::result::Result<Document, LiftError> = match w {
            Witness::Asdim(d) => {
                let n = a.n.or(d.n).ok_or_else(|| {
                    Failure::Usage("asdim needs --n or `n` in the witness".into())
                })?;
                let w = witness::asdim_from(&piece_t, &d).map_err(bad)?;
                asdim_lift(sys, s, n, &u, &w).map(|l| {
                    Document::Witness(Witness::Asdim(witness::asdim_to(&sys_t, placement, n, &l)))
                })
            }
            Witness::Exactness(d) => {
                let w = witness::exactness_from(&piece_t, &d).map_err(bad)?;
                exactness_lift(sys, s, &u, w.eps, &w.pou, &w.support_bound).map(
                    |(pou, support_bound)| {
                        let l = witness::Exactness {
                            eps: w.eps,
                            pou,
                            support_bound,
                        };
                        Document::Witness(Witness::Exactness(witness::exactness_to(
                            &sys_t, placement, &l,
                        )))
                    },
                )
            }
            Witness::Pinch(d) => {
                let tol = self.tolerance(a.tol)?;
                let w = witness::pinch_from(&piece_t, &d).map_err(bad)?;
                pinch_lift(sys, s, &u, &w, tol).map(|l| {
                    Document::Witness(Witness::Pinch(witness::pinch_to(&sys_t, placement, &l)))
                })
            }
            Witness::Amenability(d) => {
                let w = witness::amenability_from(&piece_t, &d).map_err(bad)?;
                amenability_lift(sys, s, &u, &w).map(|l| {
                    Document::Witness(Witness::Amenability(witness::amenability_to(
                        &sys_t, placement, &l,
                    )))
                })
            }
            Witness::PropertyA(d) => {
                let w = witness::property_a_from(&piece_t, &d).map_err(bad)?;
                property_a_lift(sys, s, &u, &w).map(|l| {
                    Document::Witness(Witness::PropertyA(witness::property_a_to(
                        &sys_t, placement, &l,
                    )))
                })
            }
            _ => unreachable!("handled above"),
        };
        let mut r = Report::new(command, Verdict::Verified);
        match lifted {
            Ok(doc) => {
                r.clause("piece", true, format!("the witness verifies on `{name}`"));
                r.clause(
                    "colimit",
                    true,
                    "the lifted witness verifies on the colimit",
                );
                r.data = Some(crate::doc::to_value(&doc));
                if let Some(path) = &a.output {
                    write_doc(path, &doc)?;
                    r.note(format!("wrote {}", path.display()));
                }
            }
            Err(LiftError::PieceRejected(v)) => {
                r.verdict = Verdict::Refuted;
                r.absorb("piece.", &v);
            }
            Err(LiftError::ColimitRejected(v)) => {
                r.verdict = Verdict::Refuted;
                r.absorb("colimit.", &v);
            }
            Err(LiftError::RestrictionUnbounded(p)) => {
                r.verdict = Verdict::UndecidedAtTruncation;
                r.clause(
                    "restriction",
                    false,
                    format!(
                        "the restriction to `{}` is not bounded within this truncation",
                        sys.piece(p).name()
                    ),
                );
            }
            Err(e) => return Err(Failure::Data(e.to_string())),
        }
        Ok(r)
    }

    // ---- maps ----

    fn map_check(&mut self, m: &MapCheck) -> Result<Report> {
        match m {
            MapCheck::Bornologous { source, map, dest } => {
                let src = self.target("source", source)?;
                let f = self.map("map", map)?;
                let dst = self.space("dest", dest)?;
                let rep = bornologous_check(&f, src.structure(), &dst)
                    .map_err(|e| Failure::Data(e.to_string()))?;
                let mut r = Report::new("map-check bornologous", Verdict::Verified);
                for (b, l) in &rep.entries {
                    let name = format!("generator {}", describe(&src.bound_ref(b)));
                    match l {
                        Some(l) => r.clause(name, true, format!("image bounded by {l}")),
                        None => r.clause(
                            name,
                            false,
                            "image not bounded by any level of this truncation",
                        ),
                    };
                }
                if !rep.is_bornologous() {
                    r.verdict = Verdict::UndecidedAtTruncation;
                }
                Ok(r)
            }
            MapCheck::Close { f, g, codomain } => {
                let f = self.map("f", f)?;
                let g = self.map("g", g)?;
                let dst = self.space("codomain", codomain)?;
                let rep = close_check(&f, &g, &dst).map_err(|e| Failure::Data(e.to_string()))?;
                let dom = f.domain();
                let pair = |x: usize| {
                    format!(
                        "`{}` goes to `{}` and `{}`, in no common member",
                        dom.id(x),
                        dst.points().id(f.apply(x)),
                        dst.points().id(g.apply(x))
                    )
                };
                let violations: Vec<_> = rep
                    .violations
                    .iter()
                    .map(|(l, x)| json!({ "level": l.get(), "point": dom.id(*x) }))
                    .collect();
                let mut r = Report::new("map-check close", Verdict::Verified);
                match rep.level {
                    Some(l) => {
                        r.clause("close", true, format!("every pair lies in a member of {l}"));
                        r.data = Some(json!({ "level": l.get(), "violations": violations }));
                    }
                    None => {
                        r.verdict = Verdict::Refuted;
                        for (l, x) in &rep.violations {
                            r.clause(format!("{l}"), false, pair(*x));
                        }
                        r.data = Some(json!({ "level": null, "violations": violations }));
                    }
                }
                Ok(r)
            }
            MapCheck::So {
                source,
                map,
                target,
                witness: w,
                search,
                eps,
                on,
                output,
            } => {
                let src = self.target("source", source)?;
                let f = self.map("map", map)?;
                let metric = self.metric("target", target)?;
                let mut r = Report::new("map-check so", Verdict::Verified);
                if *search {
                    let eps = parse_rational("eps", eps.as_deref().expect("clap requires --eps"))
                        .map_err(|e| Failure::Usage(e.to_string()))?;
                    let (scale, placement, notes) =
                        self.resolve_input(&src, on, InputRef::default())?;
                    r.notes = notes;
                    match slowly_oscillating_search(&f, &metric, src.structure(), &scale, eps)
                        .map_err(|e| Failure::Data(e.to_string()))?
                    {
                        Some(b) => {
                            r.clause(
                                "oscillation",
                                true,
                                format!("members outside b have image diameter below {eps}"),
                            );
                            let doc =
                                Document::Witness(Witness::SlowlyOscillating(OscillationDoc {
                                    level_in: placement.level_in,
                                    input: placement.input,
                                    eps: rational_string(eps),
                                    b: ids_of_subset(src.points(), &b),
                                }));
                            r.data = Some(crate::doc::to_value(&doc));
                            if let Some(path) = output {
                                write_doc(path, &doc)?;
                                r.note(format!("wrote {}", path.display()));
                            }
                        }
                        None => {
                            r.verdict = Verdict::UndecidedAtTruncation;
                            r.clause(
                                "search",
                                false,
                                "no exceptional set found; the search is incomplete",
                            );
                        }
                    }
                    return Ok(r);
                }
                let path = w
                    .as_deref()
                    .expect("clap requires --witness without --search");
                let Witness::SlowlyOscillating(d) = self.witness(path, "so")? else {
                    unreachable!()
                };
                let (scale, _, notes) = self.resolve_input(&src, on, d.on())?;
                r.notes = notes;
                let eps =
                    parse_rational("eps", &d.eps).map_err(|e| data_error("witness", path, e))?;
                let b = subset_from_ids(src.points(), "b", &d.b)
                    .map_err(|e| data_error("witness", path, e))?;
                match slowly_oscillating_verify(&f, &metric, src.structure(), &scale, eps, &b) {
                    Ok(()) => {
                        r.clause(
                            "weakly bounded",
                            true,
                            "b meets finitely many coarse components",
                        );
                        r.clause(
                            "oscillation",
                            true,
                            format!("members outside b have image diameter below {eps}"),
                        );
                    }
                    Err(e @ OscillationRejection::NotWeaklyBounded) => {
                        r.verdict = Verdict::Refuted;
                        r.clause("weakly bounded", false, e.to_string());
                    }
                    Err(OscillationRejection::Oscillates { member, diameter }) => {
                        r.verdict = Verdict::Refuted;
                        let ids = ids_of_subset(src.points(), &scale.members()[member]).join(", ");
                        r.clause(
                            "weakly bounded",
                            true,
                            "b meets finitely many coarse components",
                        );
                        r.clause(
                            "oscillation",
                            false,
                            format!(
                                "member {member} {{{ids}}} is outside b with image diameter {}",
                                crate::doc::distance_string(diameter)
                            ),
                        );
                    }
                    Err(OscillationRejection::Map(e)) => return Err(Failure::Data(e.to_string())),
                }
                Ok(r)
            }
        }
    }

    // ---- probe ----

    fn probe_apc(&mut self, system: &Path, prefix_len: usize, budget: usize) -> Result<Report> {
        let sys = self.system("system", system)?;
        if prefix_len == 0 {
            return Err(Failure::Usage("--prefix-len must be at least 1".into()));
        }
        let rep = apc_probe(&sys, prefix_len, budget);
        let t = Target::System(sys);
        let Target::System(sys) = &t else {
            unreachable!()
        };
        let mut r = Report::new("probe apc", Verdict::Verified);
        let mut found = Vec::new();
        let mut all = true;
        for e in &rep.entries {
            let (name, along, on_sys) = match e.target {
                ApcTarget::Piece(s) => (format!("piece {}", sys.piece(s).name()), None, false),
                ApcTarget::Colimit { along } => (
                    format!("colimit along {}", sys.piece(along).name()),
                    Some(sys.piece(along).name().to_string()),
                    true,
                ),
            };
            match &e.outcome {
                ApcOutcome::Found(w) => {
                    r.clause(name, true, format!("{} families", w.families.len()));
                    if on_sys {
                        found.push(crate::doc::to_value(&Document::Witness(Witness::Apc(
                            witness::apc_to(&t, along, w),
                        ))));
                    }
                }
                ApcOutcome::Undecided { attempts } => {
                    all = false;
                    r.clause(name, false, format!("undecided after {attempts} attempts"));
                }
            }
        }
        let consistent = rep.consistent(sys);
        r.clause(
            "consistent",
            consistent,
            "every reported witness re-verifies against its prefix",
        );
        r.verdict = match (consistent, all) {
            (false, _) => Verdict::Refuted,
            (true, true) => Verdict::Verified,
            (true, false) => Verdict::UndecidedAtTruncation,
        };
        r.note(format!(
            "prefix length {prefix_len}, budget {budget} attempts per target"
        ));
        r.data = Some(json!({ "colimit_witnesses": found }));
        Ok(r)
    }
}

fn describe(r: &LevelRef) -> String {
    match &r.piece {
        Some(p) => format!("level {} of `{p}`", r.level),
        None => format!("level {}", r.level),
    }
}

fn generator_clauses(r: &mut Report, rep: &GeneratorReport) {
    for &(i, j, k) in &rep.pairs {
        let name = format!("pair ({}, {})", i + 1, j + 1);
        match k {
            Some(k) => r.clause(name, true, format!("coarsened by family {}", k + 1)),
            None => r.clause(
                name,
                false,
                "no family of the set coarsens the closure of the pair",
            ),
        };
    }
}

fn metrizability_search(t: &Target, command: String) -> Report {
    let families: Vec<Family> = t
        .structure()
        .generators()
        .into_iter()
        .map(|(_, g)| g.clone())
        .collect();
    let rep = metrizability_generator_check(&families);
    let mut r = Report::new(command, Verdict::Verified);
    r.note("candidate: the generators of the target");
    generator_clauses(&mut r, &rep);
    if rep.passes() {
        let doc = MetrizabilityDoc {
            sets: vec![GeneratorSet {
                piece: None,
                families: families
                    .iter()
                    .map(|f| ids_of_family(t.points(), f))
                    .collect(),
            }],
        };
        r.data = Some(crate::doc::to_value(&Document::Witness(
            Witness::Metrizability(doc),
        )));
    } else {
        r.verdict = Verdict::UndecidedAtTruncation;
    }
    r
}

fn apc_search(t: &Target, a: &CheckArgs, command: String) -> Result<Report> {
    let space = match t {
        Target::Space(s) => s,
        Target::System(_) => return Err(Failure::Usage("search a system with `probe apc`".into())),
    };
    let prefix_len = a.on.level.unwrap_or(space.depth());
    if prefix_len == 0 || prefix_len > space.depth() {
        return Err(Failure::Usage(format!(
            "prefix length {prefix_len} outside 1..={}",
            space.depth()
        )));
    }
    // a one-piece system has the space as its piece
    let sys = validate_system(
        space.points().clone(),
        vec![PieceSpec {
            name: "X".into(),
            carrier: space.points().full(),
            space: space.clone(),
        }],
        None,
    )
    .map_err(|e| Failure::Data(e.to_string()))?;
    let rep = apc_probe(&sys, prefix_len, a.budget);
    let mut r = Report::new(command, Verdict::Verified);
    r.note(format!("prefix length {prefix_len}, budget {}", a.budget));
    match rep.found(ApcTarget::Piece(0)) {
        Some(w) => {
            let prefix: Vec<Family> = space.chain().into_iter().take(prefix_len).collect();
            let v = apc_verify(space, &prefix, w);
            r.absorb("", &v);
            r.verdict = verdict_of(&v);
            let doc = Document::Witness(Witness::Apc(witness::apc_to(t, None, w)));
            r.data = Some(crate::doc::to_value(&doc));
            if let Some(path) = &a.output {
                write_doc(path, &doc)?;
                r.note(format!("wrote {}", path.display()));
            }
        }
        None => {
            r.verdict = Verdict::UndecidedAtTruncation;
            r.clause(
                "search",
                false,
                "the greedy search found no witness within its budget",
            );
        }
    }
    Ok(r)
}

/// Per-piece generating sets merged into one for the colimit.
fn merge(sys: &FilteredSystem, d: &MetrizabilityDoc) -> std::result::Result<Report, DocError> {
    let mut sets = Vec::new();
    for (k, set) in d.sets.iter().enumerate() {
        let field = format!("sets[{k}].piece");
        let name = set
            .piece
            .as_deref()
            .ok_or_else(|| DocError::schema(&field, "a merged set names its piece"))?;
        let s = sys
            .piece_by_name(name)
            .ok_or_else(|| DocError::schema(&field, format!("unknown piece `{name}`")))?;
        let points = sys.piece(s).space().points();
        let families = set
            .families
            .iter()
            .enumerate()
            .map(|(i, f)| family_from_ids(points, &format!("sets[{k}].families[{i}]"), f))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        sets.push((s, families));
    }
    let mut r = Report::new("lift metrizability", Verdict::Verified);
    match metrizability_merge(sys, &sets) {
        Ok(m) => {
            r.clause(
                "routes",
                true,
                format!("{} pairs routed through upper bounds", m.routes.len()),
            );
            generator_clauses(&mut r, &m.check);
            if !m.check.passes() {
                r.verdict = Verdict::Refuted;
            }
            let doc = MetrizabilityDoc {
                sets: vec![GeneratorSet {
                    piece: None,
                    families: m
                        .families
                        .iter()
                        .map(|f| ids_of_family(sys.ambient(), f))
                        .collect(),
                }],
            };
            r.data = Some(crate::doc::to_value(&Document::Witness(
                Witness::Metrizability(doc),
            )));
        }
        Err(e @ MergeError::Truncation { .. }) => {
            r.verdict = Verdict::UndecidedAtTruncation;
            r.clause("routes", false, e.to_string());
        }
        Err(e @ MergeError::PieceFails { .. }) => {
            r.verdict = Verdict::Refuted;
            r.clause("piece sets", false, e.to_string());
        }
        Err(e) => {
            return Err(DocError::Invalid {
                what: "witness",
                message: e.to_string(),
            })
        }
    }
    Ok(r)
}

// ---- corpus ----

fn list<T: std::str::FromStr>(flag: &str, s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|_| Failure::Usage(format!("--{flag}: cannot read `{}`", p.trim())))
        })
        .collect()
}

fn corpus(a: &CorpusArgs) -> Result<Report> {
    let radii: Vec<Rational> = list("radii", &a.radii)?;
    let usage = |e: coarsekit_core::corpus::CorpusError| Failure::Usage(e.to_string());
    let mut files: Vec<(&str, Document)> = Vec::new();
    let mut seed = None;
    let mut extra_notes = Vec::new();
    let system_doc =
        |c: &Corpus| Document::System(SystemDoc::from_system(&c.system, c.notes.clone()));
    match a.kind {
        CorpusKind::C0 => {
            let c = gen_c0(a.s_max, a.box_, &radii).map_err(usage)?;
            files.push(("system.json", system_doc(&c)));
        }
        CorpusKind::DisjointUnion => {
            let lens: Vec<usize> = list("islands", &a.islands)?;
            if lens.contains(&0) {
                return Err(Failure::Usage(
                    "--islands: paths have at least one point".into(),
                ));
            }
            let islands: Vec<MetricTarget> = lens.iter().map(|&l| path_metric(l)).collect();
            let c = gen_disjoint_union(&islands, &radii).map_err(usage)?;
            files.push(("system.json", system_doc(&c)));
        }
        CorpusKind::UnitInterval => {
            let ui = gen_unit_interval(a.n_max).map_err(usage)?;
            files.push(("system.json", system_doc(&ui.corpus)));
            files.push(("f.json", Document::Map(MapDoc::from_map(&ui.f))));
            files.push(("g.json", Document::Map(MapDoc::from_map(&ui.g))));
            files.push((
                "metric.json",
                Document::Metric(MetricDoc::from_metric(&ui.target)),
            ));
            files.push((
                "piece-codomain.json",
                Document::Space(SpaceDoc::from_space(&ui.piece_codomain())),
            ));
            files.push((
                "colimit-codomain.json",
                Document::Space(SpaceDoc::from_space(&ui.colimit_codomain())),
            ));
        }
        CorpusKind::Random => {
            let caps = RandomCaps {
                points: a.max_points,
                pieces: a.max_pieces,
                depth: a.max_depth,
            };
            let rs = gen_random_system(a.seed, caps).map_err(usage)?;
            seed = Some(rs.seed);
            extra_notes.push(format!("{} candidate systems rejected", rs.rejections));
            files.push((
                "system.json",
                Document::System(SystemDoc::from_system(&rs.system, Vec::new())),
            ));
        }
    }
    fs::create_dir_all(&a.output)
        .map_err(|e| Failure::CantCreate(format!("`{}`: {e}", a.output.display())))?;
    let mut r = Report::new(format!("corpus {}", corpus_name(a.kind)), Verdict::Verified);
    let mut written = Vec::new();
    for (name, doc) in &files {
        let path: PathBuf = a.output.join(name);
        write_doc(&path, doc)?;
        r.clause(*name, true, doc.kind());
        written.push(path.display().to_string());
    }
    if let Some(Document::System(d)) = files.first().map(|(_, d)| d) {
        r.notes.extend(d.notes.iter().cloned());
    }
    r.notes.extend(extra_notes);
    r.seed = seed;
    r.data = Some(json!({ "files": written }));
    Ok(r)
}

fn corpus_name(k: CorpusKind) -> &'static str {
    match k {
        CorpusKind::C0 => "c0",
        CorpusKind::DisjointUnion => "disjoint-union",
        CorpusKind::UnitInterval => "unit-interval",
        CorpusKind::Random => "random",
    }
}
