use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "pfacap", version, about = "Exact PFAs, their channels and capacity brackets")]
pub struct Cli {
    /// Worker threads for parallel sections; results do not depend on it.
    #[arg(long, global = true, env = "PFACAP_THREADS")]
    pub threads: Option<usize>,

    /// Directory for output files and the run manifest.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect and evaluate automata.
    #[command(subcommand)]
    Pfa(PfaCmd),
    /// Build the gadget automata.
    #[command(subcommand)]
    Gadget(GadgetCmd),
    /// Synthesize witness words for D_{x,1/2} or D_{A,1/2}.
    Witness(WitnessArgs),
    /// Build or sample the channel V_A.
    #[command(subcommand)]
    Channel(ChannelCmd),
    /// Capacity bounds and experiments.
    #[command(subcommand)]
    Capacity(CapacityCmd),
    /// Prime-power coding of rational tuples.
    #[command(subcommand)]
    Sigma(SigmaCmd),
    /// Re-run a manifest and check that every output is reproduced.
    Replay {
        manifest: PathBuf,
    },
}

/// `--pfa` takes a TOML file or a built-in name.
#[derive(Debug, Args, Clone)]
pub struct PfaInput {
    /// Automaton file, or one of: example1, always-accepting,
    /// never-accepting, mixed-start, coin.
    #[arg(long)]
    pub pfa: String,
}

#[derive(Debug, Subcommand)]
pub enum PfaCmd {
    /// Check an automaton file and list any violations.
    Validate(PfaInput),
    /// Exact acceptance probability of a word.
    Value {
        #[command(flatten)]
        input: PfaInput,
        #[arg(long)]
        word: String,
    },
    /// Exhaustive search up to a length; with --threshold, the first word
    /// exceeding it.
    Search {
        #[command(flatten)]
        input: PfaInput,
        #[arg(long)]
        max_len: usize,
        #[arg(long)]
        threshold: Option<String>,
        #[arg(long, default_value_t = 4_000_000)]
        max_words: u128,
    },
}

#[derive(Debug, Subcommand)]
pub enum GadgetCmd {
    /// D_{x,y} over {a, b}.
    Dxy {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// D_{A,y} over {a, b, c}.
    Day {
        #[command(flatten)]
        input: PfaInput,
        #[arg(long)]
        y: String,
    },
    /// B_p: values scaled by p.
    Bp {
        #[command(flatten)]
        input: PfaInput,
        #[arg(long)]
        p: String,
    },
    /// C_p: values scaled by p and shifted by 1 - p.
    Cp {
        #[command(flatten)]
        input: PfaInput,
        #[arg(long)]
        p: String,
    },
    /// gamma(D_{A,lambda/2}).
    Family {
        #[command(flatten)]
        input: PfaInput,
        #[arg(long)]
        lambda: String,
    },
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    /// Plain mode: the gadget parameter x in (1/2, 1].
    #[arg(long, conflicts_with_all = ["pfa", "inner"])]
    pub x: Option<String>,
    /// Lifted mode: the embedded automaton.
    #[arg(long, requires = "inner")]
    pub pfa: Option<String>,
    /// Lifted mode: the inner word whose value plays the role of x.
    #[arg(long)]
    pub inner: Option<String>,
    #[arg(long)]
    pub eps: String,
    /// Largest k of the sweep (k >= 2).
    #[arg(long)]
    pub k: usize,
}

#[derive(Debug, Subcommand)]
pub enum ChannelCmd {
    /// Write V_A (of gamma(A) unless A already has id and rt) as TOML.
    Build(PfaInput),
    /// One trajectory of a channel.
    Sample {
        /// Automaton whose V_A is sampled.
        #[arg(long, conflicts_with = "channel")]
        pfa: Option<String>,
        /// Channel file.
        #[arg(long)]
        channel: Option<PathBuf>,
        /// Input labels separated by spaces, e.g. "0:a 1:id 0:rt".
        #[arg(long)]
        inputs: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum CapacityCmd {
    /// Lower and upper capacity bounds of V_A.
    Bracket {
        #[command(flatten)]
        input: PfaInput,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// Largest block length m + n evaluated exactly.
        #[arg(long, default_value_t = 12)]
        budget: usize,
        /// Length limit of the exhaustive word search.
        #[arg(long, default_value_t = 6)]
        horizon: usize,
        /// Upper-bound certificate, e.g. "dxy:2/5,1/2".
        #[arg(long)]
        certificate: Option<String>,
        /// Extra candidate words (repeatable).
        #[arg(long = "word")]
        words: Vec<String>,
    },
    /// Blahut-Arimoto on a memoryless channel file.
    Ba {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iters: usize,
    },
    /// Entropy and rate bounds under random product inputs.
    Converse {
        #[command(flatten)]
        input: PfaInput,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Stage lengths and the spectrum concentration demo.
    #[command(subcommand)]
    Stability(StabilityCmd),
}

#[derive(Debug, Subcommand)]
pub enum StabilityCmd {
    /// Stage lengths m_t for block lengths n_1, ..., n_{T+1}.
    Schedule {
        #[arg(long)]
        val: f64,
        #[arg(long)]
        delta: f64,
        /// Comma-separated block lengths.
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<usize>,
    },
    /// Sampled information density of the first stage.
    Demo {
        #[arg(long, default_value = "coin")]
        pfa: String,
        #[arg(long, default_value = "a")]
        word: String,
        #[arg(long, default_value_t = 2)]
        free: usize,
        /// Repetitions of the block; defaults to m_1 of the schedule with
        /// n_1 = n_2 = block length.
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        etas: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum SigmaCmd {
    /// Encode positive rationals, e.g. `sigma encode 1/2 3`.
    Encode {
        #[arg(required = true)]
        values: Vec<String>,
    },
    /// Decode a code of the given arity.
    Decode {
        code: String,
        #[arg(long)]
        arity: usize,
    },
}
