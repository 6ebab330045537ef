use std::fmt;
use std::path::{Path, PathBuf};

use schemalink::dataset::{DatasetError, Language};
use schemalink::embed::{EmbedError, FileStore, RemoteClient, ENDPOINT_ENV};
use schemalink::linker::{LinkError, LinkingConfig, SchemaNaming, SpanMode, DEFAULT_TAU};
use schemalink::sql::EvalError;
use schemalink::{EmbeddingProvider, Exec};
use serde::Deserialize;

use crate::{GlobalArgs, LanguageArg, ProviderKind};

#[derive(Debug)]
pub enum CliError {
    /// Bad input, bad data or bad configuration. Exit status 1.
    Validation(String),
    /// The embedding service could not be reached. Exit status 2.
    Transport(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Transport(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Transport(m) => f.write_str(m),
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<EmbedError> for CliError {
    fn from(e: EmbedError) -> Self {
        if e.is_transport() {
            CliError::Transport(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<LinkError> for CliError {
    fn from(e: LinkError) -> Self {
        match e {
            LinkError::Embed(e) => e.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Settings readable from `--config`. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    tau: Option<f64>,
    csr: Option<bool>,
    provider: Option<ProviderKind>,
    endpoint: Option<String>,
    vectors: Option<PathBuf>,
    jobs: Option<usize>,
    out: Option<PathBuf>,
    language: Option<LanguageArg>,
    span: Option<usize>,
    original_names: Option<bool>,
    schemas: Option<PathBuf>,
    train: Option<PathBuf>,
    test: Option<PathBuf>,
    examples: Option<PathBuf>,
    gold: Option<PathBuf>,
    predictions: Option<PathBuf>,
    pairs: Option<PathBuf>,
    deps: Option<PathBuf>,
}

#[derive(Debug)]
pub struct RunConfig {
    pub linking: LinkingConfig,
    pub provider: ProviderKind,
    pub endpoint: Option<String>,
    pub vectors: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub out: PathBuf,
    pub language: Option<Language>,
    file: FileConfig,
}

impl RunConfig {
    pub fn resolve(args: &GlobalArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => {
                let body = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
                toml::from_str(&body)
                    .map_err(|e| CliError::Validation(format!("bad config {}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let tau = args.tau.or(file.tau).unwrap_or(DEFAULT_TAU);
        let span_mode = match args.span.or(file.span) {
            None | Some(1) => SpanMode::SingleToken,
            Some(k) => SpanMode::UpTo(k),
        };
        let linking = LinkingConfig {
            tau,
            csr_enabled: !args.no_csr && file.csr.unwrap_or(true),
            span_mode,
            schema_naming: if args.original_names || file.original_names.unwrap_or(false) {
                SchemaNaming::Original
            } else {
                SchemaNaming::Display
            },
        };
        linking.validate()?;
        let jobs = args.jobs.or(file.jobs);
        if jobs == Some(0) {
            return Err(CliError::Validation("--jobs must be at least 1".into()));
        }
        let language = args.language.or(file.language).map(|l| match l {
            LanguageArg::Arabic => Language::Arabic,
            LanguageArg::English => Language::English,
        });
        Ok(RunConfig {
            linking,
            provider: args.provider.or(file.provider).unwrap_or(ProviderKind::File),
            endpoint: args.endpoint.clone().or_else(|| file.endpoint.clone()),
            vectors: args.vectors.clone().or_else(|| file.vectors.clone()),
            jobs,
            out: args.out.clone().or_else(|| file.out.clone()).unwrap_or_else(|| PathBuf::from("out")),
            language,
            file,
        })
    }

    pub fn install_pool(&self) -> Result<()> {
        if let Some(n) = self.jobs {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Validation(format!("cannot start worker pool: {e}")))?;
        }
        Ok(())
    }

    pub fn exec(&self) -> Exec {
        if self.jobs == Some(1) {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }

    /// Flag value, else config value, else a validation error naming the flag.
    pub fn path(&self, flag: Option<PathBuf>, key: &str) -> Result<PathBuf> {
        let from_file = match key {
            "schemas" => &self.file.schemas,
            "train" => &self.file.train,
            "test" => &self.file.test,
            "examples" => &self.file.examples,
            "gold" => &self.file.gold,
            "predictions" => &self.file.predictions,
            "pairs" => &self.file.pairs,
            "deps" => &self.file.deps,
            _ => &None,
        };
        let path =
            flag.or_else(|| from_file.clone()).ok_or_else(|| CliError::Validation(format!("missing --{key}")))?;
        if !path.exists() {
            return Err(CliError::Validation(format!("--{key}: {} does not exist", path.display())));
        }
        Ok(path)
    }

    pub fn optional_path(&self, flag: Option<PathBuf>, key: &str) -> Result<Option<PathBuf>> {
        match self.path(flag, key) {
            Ok(p) => Ok(Some(p)),
            Err(CliError::Validation(m)) if m.starts_with("missing") => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Provider for the cosine pass, or `None` when it is disabled.
    pub fn provider(&self) -> Result<Option<Box<dyn EmbeddingProvider>>> {
        if !self.linking.csr_enabled {
            return Ok(None);
        }
        Ok(Some(match self.provider {
            ProviderKind::File => {
                let path = self
                    .vectors
                    .as_ref()
                    .ok_or_else(|| CliError::Validation("the file provider needs --vectors".into()))?;
                Box::new(FileStore::load(path)?)
            }
            ProviderKind::Remote => Box::new(self.remote(None)?),
        }))
    }

    pub fn remote(&self, endpoint: Option<&str>) -> Result<RemoteClient> {
        let endpoint = endpoint
            .or(self.endpoint.as_deref())
            .ok_or_else(|| CliError::Validation(format!("the remote provider needs --endpoint or {ENDPOINT_ENV}")))?;
        Ok(RemoteClient::new(endpoint))
    }

    pub fn out_file(&self, name: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out)
            .map_err(|e| CliError::Validation(format!("cannot create {}: {e}", self.out.display())))?;
        Ok(self.out.join(name))
    }
}

pub fn write(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))
}
