use std::fmt;

/// Machine-readable error category; doubles as the process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Usage = 2,
    Config = 3,
    Parse = 4,
    Domain = 5,
    Fit = 6,
    Io = 7,
}

impl Category {
    pub fn label(self) -> &'static str {
        match self {
            Category::Usage => "usage",
            Category::Config => "config",
            Category::Parse => "parse",
            Category::Domain => "domain",
            Category::Fit => "fit",
            Category::Io => "io",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub category: Category,
    pub message: String,
}

impl CliError {
    pub fn new(category: Category, message: impl Into<String>) -> Self {
        Self {
            category,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(Category::Usage, message)
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(Category::Config, message)
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(Category::Parse, message)
    }

    pub fn exit_code(&self) -> i32 {
        self.category as i32
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.category.label(), self.message)
    }
}

impl From<qpsk_receiver::Error> for CliError {
    fn from(err: qpsk_receiver::Error) -> Self {
        let category = match err {
            qpsk_receiver::Error::InvalidParameter { .. } => Category::Domain,
            qpsk_receiver::Error::Degenerate(_) => Category::Usage,
            qpsk_receiver::Error::FitFailure(_) => Category::Fit,
        };
        Self::new(category, err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        Self::new(Category::Io, err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
