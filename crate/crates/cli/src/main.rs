//! `tunefind`: ingest tunes, search them by text and melody, record
//! listening and get recommendations.

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use tunefind::assoc::CorpusClient;
use tunefind::config::Config;
use tunefind::melody::{flatten, notefile};
use tunefind::profile::{parse_scrobbles, ScrobbleEvent, Sex, UserProfile};
use tunefind::query::hum_literals;
use tunefind::store::persist::RECORDS;
use tunefind::store::{Database, DirLock, StoreError};
use tunefind::TuneId;

use output::Output;

#[derive(Parser, Debug)]
#[command(name = "tunefind", version, about = "Melody and text search over a tune collection")]
struct Cli {
    /// Database directory (default: the `db` config key).
    #[arg(long, global = true)]
    db: Option<PathBuf>,
    /// `key = value` file applied over the stored configuration.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Single configuration override, applied after --config.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// One JSON object per output line instead of a table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Add or replace tunes from metadata and note files.
    Ingest(IngestArgs),
    /// Repartition all pattern spaces from scratch.
    Rebuild,
    /// Run a query.
    Search(SearchArgs),
    /// Free-association mining.
    #[command(subcommand)]
    Assoc(AssocCommand),
    /// Record listening.
    #[command(subcommand)]
    Scrobble(ScrobbleCommand),
    /// Declare listeners.
    #[command(subcommand)]
    Profile(ProfileCommand),
    /// Listener groups.
    #[command(subcommand)]
    Groups(GroupsCommand),
    /// Tunes popular among a listener's group that they have not heard.
    Recommend {
        #[arg(long)]
        user: String,
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Configuration.
    #[command(subcommand)]
    Config(ConfigCommand),
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// Metadata file (`key: value` lines).
    #[arg(required_unless_present = "dir", conflicts_with = "dir")]
    meta: Option<PathBuf>,
    /// Note file for the tune (`onset_ms,duration_ms,pitch,velocity,channel,percussive` lines).
    #[arg(long, conflicts_with = "dir")]
    notes: Option<PathBuf>,
    /// Ingest every `*.meta` in a directory, each with its `*.csv` if present.
    #[arg(long)]
    dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Query text; see the README for the grammar.
    #[arg(default_value = "")]
    query: String,
    /// Note file of a hummed melody, appended as PIT, IOI and BTH literals.
    #[arg(long, value_name = "FILE")]
    hum: Option<PathBuf>,
    /// Order results by relevancy for this listener and record the search.
    #[arg(long)]
    user: Option<String>,
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long)]
    d1: Option<f64>,
    #[arg(long)]
    rel_alpha: Option<f64>,
    #[arg(long)]
    rel_beta: Option<f64>,
    #[arg(long)]
    rel_gamma: Option<f64>,
    #[arg(long)]
    rel_delta: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum AssocCommand {
    /// Mine associations for one tune from a local document corpus.
    Mine {
        #[arg(long)]
        tune: u64,
        /// Directory with one plain-text document per file.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        threshold: Option<f64>,
    },
}

#[derive(Subcommand, Debug)]
enum ScrobbleCommand {
    /// Record one play.
    Add {
        #[arg(long)]
        user: String,
        #[arg(long)]
        tune: u64,
        /// Seconds since the epoch (default: now).
        #[arg(long)]
        timestamp: Option<u64>,
    },
    /// Record every `user_id,tune_id,timestamp` line of a file, or none.
    Import { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum ProfileCommand {
    /// Create or update a listener, keeping their history.
    Set {
        #[arg(long)]
        user: String,
        #[arg(long)]
        age: u32,
        #[arg(long, default_value = "unspecified")]
        sex: Sex,
        /// Comma-separated preferred genres.
        #[arg(long, default_value = "")]
        genres: String,
    },
    /// Declare listeners from `id,age,sex,genre;genre` lines.
    Import { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum GroupsCommand {
    /// Cluster listeners by age and preferred genres.
    Assign {
        /// Number of groups (default: the `groups` config key).
        #[arg(long)]
        count: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum ConfigCommand {
    /// Print every parameter with its effective value.
    Show,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failed(String),
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Query(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let mut out = Output::stdout(cli.json);
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            eprintln!("run `tunefind --help` for usage");
            ExitCode::from(2)
        }
        Err(CliError::Failed(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))
}

/// Stored configuration, then `--config`, then `--set`.
fn layered_config(cli: &Cli, stored: Config) -> Result<Config, CliError> {
    let mut c = stored;
    if let Some(path) = &cli.config {
        c.apply(&read(path)?)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    }
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        c.set(k.trim(), v.trim())
            .map_err(|e| CliError::Usage(format!("--set {kv}: {e}")))?;
    }
    Ok(c)
}

fn db_dir(cli: &Cli) -> Result<PathBuf, CliError> {
    if let Some(d) = &cli.db {
        return Ok(d.clone());
    }
    Ok(layered_config(cli, Config::default())?.db)
}

fn open(cli: &Cli, dir: &Path) -> Result<Database, CliError> {
    let mut db = if dir.join(RECORDS.0).exists() {
        Database::load(dir)?
    } else {
        Database::new(Config::default())?
    };
    db.config = layered_config(cli, db.config.clone())?;
    db.config.db = dir.to_path_buf();
    Ok(db)
}

fn mutates(c: &Command) -> bool {
    match c {
        Command::Search(a) => a.user.is_some(),
        Command::Recommend { .. } | Command::Config(_) => false,
        _ => true,
    }
}

fn run(cli: Cli, out: &mut Output) -> Result<(), CliError> {
    let dir = db_dir(&cli)?;
    if !mutates(&cli.command) {
        let db = open(&cli, &dir)?;
        return match &cli.command {
            Command::Search(a) => search(&db, a, out),
            Command::Recommend { user, top } => {
                let recs = db.recommend(user, *top)?;
                out.recommendations(&db, &recs);
                Ok(())
            }
            Command::Config(ConfigCommand::Show) => {
                out.config(&db.config);
                Ok(())
            }
            _ => unreachable!("mutating command"),
        };
    }

    let lock = DirLock::acquire(&dir)?;
    let mut db = open(&cli, &dir)?;
    match &cli.command {
        Command::Ingest(a) => ingest(&mut db, a, out)?,
        Command::Rebuild => {
            db.rebuild()?;
            out.message(&format!("rebuilt {} patterns", pattern_count(&db)));
        }
        Command::Search(a) => {
            search(&db, a, out)?;
            let user = a.user.as_deref().expect("mutating search has a user");
            db.record_search(user, &full_query(&db, a)?)?;
        }
        Command::Assoc(AssocCommand::Mine {
            tune,
            corpus,
            alpha,
            beta,
            gamma,
            threshold,
        }) => {
            let path = corpus
                .clone()
                .or_else(|| db.config.corpus.clone())
                .ok_or_else(|| CliError::Usage("no corpus: pass --corpus or set `corpus`".into()))?;
            let client = CorpusClient::open(&path).map_err(StoreError::from)?;
            let saved = db.config.assoc;
            let p = &mut db.config.assoc;
            override_with(&mut p.alpha, *alpha);
            override_with(&mut p.beta, *beta);
            override_with(&mut p.gamma, *gamma);
            override_with(&mut p.threshold, *threshold);
            let mined = db.mine_associations(TuneId(*tune), &client);
            db.config.assoc = saved;
            out.associations(&mined?);
        }
        Command::Scrobble(ScrobbleCommand::Add {
            user,
            tune,
            timestamp,
        }) => {
            let timestamp = timestamp.unwrap_or_else(|| {
                SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            });
            db.scrobble(ScrobbleEvent {
                user_id: user.clone(),
                tune_id: TuneId(*tune),
                timestamp,
            })?;
            out.message("recorded 1 scrobble");
        }
        Command::Scrobble(ScrobbleCommand::Import { file }) => {
            let events = parse_scrobbles(&read(file)?)
                .map_err(|e| CliError::Failed(format!("{}: {e}", file.display())))?;
            let n = db.import_scrobbles(events)?;
            out.message(&format!("recorded {n} scrobbles"));
        }
        Command::Profile(ProfileCommand::Set {
            user,
            age,
            sex,
            genres,
        }) => {
            let g: Vec<&str> = genres.split([',', ';']).filter(|g| !g.trim().is_empty()).collect();
            db.set_profile(UserProfile::new(user, *age, *sex, &g));
            out.message(&format!("profile {user} saved"));
        }
        Command::Profile(ProfileCommand::Import { file }) => {
            let profiles = parse_users(&read(file)?)
                .map_err(|e| CliError::Failed(format!("{}: {e}", file.display())))?;
            let n = profiles.len();
            for p in profiles {
                db.set_profile(p);
            }
            out.message(&format!("saved {n} profiles"));
        }
        Command::Groups(GroupsCommand::Assign { count }) => {
            let g = count.unwrap_or(db.config.groups);
            let groups = db.assign_groups(g)?.to_vec();
            out.groups(&groups);
        }
        Command::Recommend { .. } | Command::Config(_) => unreachable!("read-only command"),
    }
    db.save_locked(&lock)?;
    Ok(())
}

fn override_with(slot: &mut f64, v: Option<f64>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn pattern_count(db: &Database) -> usize {
    [&db.spaces.pit, &db.spaces.ioi, &db.spaces.bth]
        .iter()
        .map(|s| s.patterns().count())
        .sum()
}

fn ingest(db: &mut Database, a: &IngestArgs, out: &mut Output) -> Result<(), CliError> {
    let mut jobs: Vec<(PathBuf, Option<PathBuf>)> = Vec::new();
    if let Some(dir) = &a.dir {
        let entries =
            fs::read_dir(dir).map_err(|e| CliError::Failed(format!("{}: {e}", dir.display())))?;
        let mut metas: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "meta"))
            .collect();
        metas.sort();
        for m in metas {
            let notes = m.with_extension("csv");
            jobs.push((m, notes.exists().then_some(notes)));
        }
    } else if let Some(meta) = &a.meta {
        jobs.push((meta.clone(), a.notes.clone()));
    }
    let mut ingested = Vec::new();
    for (meta, notes) in jobs {
        let id = db
            .ingest_files(&meta, notes.as_deref())
            .map_err(|e| CliError::Failed(format!("{}: {e}", meta.display())))?;
        ingested.push(id);
    }
    out.ingested(db, &ingested);
    Ok(())
}

/// The query text with any hummed melody appended as literals.
fn full_query(db: &Database, a: &SearchArgs) -> Result<String, CliError> {
    let mut q = a.query.trim().to_string();
    if let Some(path) = &a.hum {
        let events = notefile::parse_events(&read(path)?).map_err(StoreError::from)?;
        let line = flatten(&events, db.config.grid_ms);
        let length = db.config.pattern_length.min(line.len());
        let literals = hum_literals(&line, db.config.k, length);
        if literals.is_empty() {
            return Err(CliError::Usage(format!("{}: no notes to hum", path.display())));
        }
        for l in literals {
            if !q.is_empty() {
                q.push(' ');
            }
            q.push_str(&l.to_string());
        }
    }
    Ok(q)
}

fn search(db: &Database, a: &SearchArgs, out: &mut Output) -> Result<(), CliError> {
    let q = full_query(db, a)?;
    let mut db = db.clone();
    override_with(&mut db.config.d1, a.d1);
    let r = &mut db.config.relevancy;
    override_with(&mut r.alpha, a.rel_alpha);
    override_with(&mut r.beta, a.rel_beta);
    override_with(&mut r.gamma, a.rel_gamma);
    override_with(&mut r.delta, a.rel_delta);
    let limit = a.limit.unwrap_or(usize::MAX);
    match &a.user {
        Some(user) => {
            let mut ranked = db.search_for(&q, user)?;
            ranked.truncate(limit);
            out.ranked(&db, &ranked);
        }
        None => {
            let mut hits = db.search(&q)?;
            hits.truncate(limit);
            out.hits(&db, &hits);
        }
    }
    Ok(())
}

/// Parses `id,age,sex,genre;genre` lines; blank lines and `#` comments are
/// skipped.
fn parse_users(text: &str) -> Result<Vec<UserProfile>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: String| format!("line {}: {m}", i + 1);
        let fields: Vec<&str> = line.splitn(4, ',').map(str::trim).collect();
        let [id, age, sex, genres] = fields[..] else {
            return Err(err(format!("expected 4 fields, found {}", fields.len())));
        };
        if id.is_empty() {
            return Err(err("empty user id".into()));
        }
        let age = age.parse().map_err(|_| err(format!("bad age {age:?}")))?;
        let sex = sex.parse().map_err(err)?;
        let g: Vec<&str> = genres.split([';', ',']).filter(|g| !g.trim().is_empty()).collect();
        out.push(UserProfile::new(id, age, sex, &g));
    }
    Ok(out)
}
