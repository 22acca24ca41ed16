use census_core::Error as CoreError;

/// CLI failure with its process exit code: 2 for malformed input, 3 for
/// precondition violations, 4 for count overflow, 1 for everything else.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: msg.into(),
        }
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: msg.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::Overflow => 4,
            _ => 3,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            code: 1,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_error_exit_codes() {
        assert_eq!(CliError::from(CoreError::Overflow).code, 4);
        assert_eq!(CliError::from(CoreError::invalid("x")).code, 3);
        assert_eq!(
            CliError::from(CoreError::MethodRefused {
                method: "brute",
                reason: "too big".into()
            })
            .code,
            3
        );
        assert_eq!(CliError::usage("bad flag").code, 2);
        assert_eq!(CliError::precondition("bad domain").code, 3);
    }
}
