use std::fmt;

use ldfs::corpus::CorpusError;
use ldfs::ldfs::LdfsError;

/// Failure category, mapped to the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Input,
    Config,
    Backend,
}

impl Category {
    pub fn exit_code(self) -> i32 {
        match self {
            Category::Input => 2,
            Category::Config => 3,
            Category::Backend => 4,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Input => "input error",
            Category::Config => "config error",
            Category::Backend => "backend error",
        })
    }
}

#[derive(Debug)]
pub struct Categorized {
    pub category: Category,
    pub source: anyhow::Error,
}

impl fmt::Display for Categorized {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:#}", self.category, self.source)
    }
}

impl std::error::Error for Categorized {}

pub trait CategoryExt<T> {
    fn category(self, category: Category) -> anyhow::Result<T>;
}

impl<T, E: Into<anyhow::Error>> CategoryExt<T> for Result<T, E> {
    fn category(self, category: Category) -> anyhow::Result<T> {
        self.map_err(|e| {
            Categorized {
                category,
                source: e.into(),
            }
            .into()
        })
    }
}

pub fn config_error(message: impl fmt::Display) -> anyhow::Error {
    Categorized {
        category: Category::Config,
        source: anyhow::anyhow!("{message}"),
    }
    .into()
}

pub fn input_error(message: impl fmt::Display) -> anyhow::Error {
    Categorized {
        category: Category::Input,
        source: anyhow::anyhow!("{message}"),
    }
    .into()
}

pub fn ldfs_error(e: LdfsError) -> anyhow::Error {
    let category = match &e {
        _ if e.is_backend() => Category::Backend,
        LdfsError::SkipSimilarityNeedsAll => Category::Config,
        _ => Category::Input,
    };
    Categorized {
        category,
        source: e.into(),
    }
    .into()
}

pub fn corpus(e: CorpusError) -> anyhow::Error {
    Categorized {
        category: Category::Input,
        source: e.into(),
    }
    .into()
}

/// Exit code for an error returned from a command; uncategorized errors exit 1.
pub fn exit_code(e: &anyhow::Error) -> i32 {
    e.chain()
        .find_map(|c| c.downcast_ref::<Categorized>())
        .map_or(1, |c| c.category.exit_code())
}
