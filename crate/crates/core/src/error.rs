use std::fmt;

use serde::{Deserialize, Serialize};

/// Stable machine-readable identifiers for every error and warning the
/// toolkit reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Code {
    // model validation errors
    #[serde(rename = "E_NO_INITIAL")]
    NoInitial,
    #[serde(rename = "E_MULTI_INITIAL")]
    MultiInitial,
    #[serde(rename = "E_DANGLING_ENDPOINT")]
    DanglingEndpoint,
    #[serde(rename = "E_FINAL_OUTGOING")]
    FinalOutgoing,
    #[serde(rename = "E_EMPTY_EVENT")]
    EmptyEvent,
    #[serde(rename = "E_DUPLICATE_TRANSITION")]
    DuplicateTransition,
    #[serde(rename = "E_INITIAL_INCOMING")]
    InitialIncoming,
    #[serde(rename = "E_DUPLICATE_STATE_ID")]
    DuplicateStateId,
    #[serde(rename = "E_DUPLICATE_TRANSITION_ID")]
    DuplicateTransitionId,
    #[serde(rename = "E_DUPLICATE_STATE_NAME")]
    DuplicateStateName,
    #[serde(rename = "E_INVALID_STATE_NAME")]
    InvalidStateName,
    #[serde(rename = "E_INVALID_TEXT")]
    InvalidText,

    // model validation warnings
    #[serde(rename = "W_UNREACHABLE_STATE")]
    UnreachableState,
    #[serde(rename = "W_DEADEND")]
    Deadend,
    #[serde(rename = "W_EVENT_OVERLAP")]
    EventOverlap,
    #[serde(rename = "W_PLACEHOLDER_NOT_IN_EVENT")]
    PlaceholderNotInEvent,
    #[serde(rename = "W_PLACEHOLDER_CASE")]
    PlaceholderCase,

    // guard DSL
    #[serde(rename = "E_EMPTY_GUARD")]
    EmptyGuard,
    #[serde(rename = "E_GUARD_SYNTAX")]
    GuardSyntax,
    #[serde(rename = "E_PLACEHOLDER_SYNTAX")]
    PlaceholderSyntax,
    #[serde(rename = "E_UNBOUND_PLACEHOLDER")]
    UnboundPlaceholder,

    // model formats
    #[serde(rename = "E_XML")]
    Xml,
    #[serde(rename = "E_XMI_DANGLING_REF")]
    XmiDanglingRef,
    #[serde(rename = "E_UNSUPPORTED_NESTING")]
    UnsupportedNesting,
    #[serde(rename = "E_SCDL_SYNTAX")]
    ScdlSyntax,
    #[serde(rename = "E_SCDL_UNKNOWN_STATE")]
    ScdlUnknownState,
    #[serde(rename = "E_INVALID_MODEL")]
    InvalidModel,

    // lookups and scenario generation
    #[serde(rename = "E_UNKNOWN_STATE")]
    UnknownState,
    #[serde(rename = "E_UNKNOWN_TRANSITION")]
    UnknownTransition,
    #[serde(rename = "E_BROKEN_PATH")]
    BrokenPath,
    #[serde(rename = "E_INVALID_ARGUMENT")]
    InvalidArgument,

    // feature text
    #[serde(rename = "E_FEATURE_SYNTAX")]
    FeatureSyntax,
    #[serde(rename = "E_FEATURE_ORDER")]
    FeatureOrder,
    #[serde(rename = "E_NO_TARGET_STATE")]
    NoTargetState,
    #[serde(rename = "E_CONFLICTING_TRANSITION")]
    ConflictingTransition,
    #[serde(rename = "E_MULTI_STEP_UNSUPPORTED")]
    MultiStepUnsupported,

    // walkthrough
    #[serde(rename = "E_NOT_ENABLED")]
    NotEnabled,
    #[serde(rename = "E_EXTRA_BINDING")]
    ExtraBinding,
    #[serde(rename = "E_INVALID_BINDING")]
    InvalidBinding,
    #[serde(rename = "E_EMPTY_TRACE")]
    EmptyTrace,
    #[serde(rename = "E_UNKNOWN_SESSION")]
    UnknownSession,
    #[serde(rename = "E_UNKNOWN_MODEL")]
    UnknownModel,

    #[serde(rename = "E_IO")]
    Io,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::NoInitial => "E_NO_INITIAL",
            Code::MultiInitial => "E_MULTI_INITIAL",
            Code::DanglingEndpoint => "E_DANGLING_ENDPOINT",
            Code::FinalOutgoing => "E_FINAL_OUTGOING",
            Code::EmptyEvent => "E_EMPTY_EVENT",
            Code::DuplicateTransition => "E_DUPLICATE_TRANSITION",
            Code::InitialIncoming => "E_INITIAL_INCOMING",
            Code::DuplicateStateId => "E_DUPLICATE_STATE_ID",
            Code::DuplicateTransitionId => "E_DUPLICATE_TRANSITION_ID",
            Code::DuplicateStateName => "E_DUPLICATE_STATE_NAME",
            Code::InvalidStateName => "E_INVALID_STATE_NAME",
            Code::InvalidText => "E_INVALID_TEXT",
            Code::UnreachableState => "W_UNREACHABLE_STATE",
            Code::Deadend => "W_DEADEND",
            Code::EventOverlap => "W_EVENT_OVERLAP",
            Code::PlaceholderNotInEvent => "W_PLACEHOLDER_NOT_IN_EVENT",
            Code::PlaceholderCase => "W_PLACEHOLDER_CASE",
            Code::EmptyGuard => "E_EMPTY_GUARD",
            Code::GuardSyntax => "E_GUARD_SYNTAX",
            Code::PlaceholderSyntax => "E_PLACEHOLDER_SYNTAX",
            Code::UnboundPlaceholder => "E_UNBOUND_PLACEHOLDER",
            Code::Xml => "E_XML",
            Code::XmiDanglingRef => "E_XMI_DANGLING_REF",
            Code::UnsupportedNesting => "E_UNSUPPORTED_NESTING",
            Code::ScdlSyntax => "E_SCDL_SYNTAX",
            Code::ScdlUnknownState => "E_SCDL_UNKNOWN_STATE",
            Code::InvalidModel => "E_INVALID_MODEL",
            Code::UnknownState => "E_UNKNOWN_STATE",
            Code::UnknownTransition => "E_UNKNOWN_TRANSITION",
            Code::BrokenPath => "E_BROKEN_PATH",
            Code::InvalidArgument => "E_INVALID_ARGUMENT",
            Code::FeatureSyntax => "E_FEATURE_SYNTAX",
            Code::FeatureOrder => "E_FEATURE_ORDER",
            Code::NoTargetState => "E_NO_TARGET_STATE",
            Code::ConflictingTransition => "E_CONFLICTING_TRANSITION",
            Code::MultiStepUnsupported => "E_MULTI_STEP_UNSUPPORTED",
            Code::NotEnabled => "E_NOT_ENABLED",
            Code::ExtraBinding => "E_EXTRA_BINDING",
            Code::InvalidBinding => "E_INVALID_BINDING",
            Code::EmptyTrace => "E_EMPTY_TRACE",
            Code::UnknownSession => "E_UNKNOWN_SESSION",
            Code::UnknownModel => "E_UNKNOWN_MODEL",
            Code::Io => "E_IO",
        }
    }

    /// True for codes that mean the model is not well formed.
    pub fn is_model_error(self) -> bool {
        matches!(
            self,
            Code::NoInitial
                | Code::MultiInitial
                | Code::DanglingEndpoint
                | Code::FinalOutgoing
                | Code::EmptyEvent
                | Code::DuplicateTransition
                | Code::InitialIncoming
                | Code::UnsupportedNesting
                | Code::DuplicateStateId
                | Code::DuplicateTransitionId
                | Code::DuplicateStateName
                | Code::InvalidStateName
                | Code::InvalidText
                | Code::InvalidModel
        )
    }

    pub fn is_warning(self) -> bool {
        self.as_str().starts_with("W_")
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Error returned by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct Error {
    pub code: Code,
    pub message: String,
    /// 1-based source line, when the error comes from a text document.
    pub line: Option<usize>,
}

impl Error {
    pub fn new(code: Code, message: impl Into<String>) -> Self {
        Error {
            code,
            message: message.into(),
            line: None,
        }
    }

    pub fn at_line(code: Code, line: usize, message: impl Into<String>) -> Self {
        Error {
            code,
            message: message.into(),
            line: Some(line),
        }
    }

    pub fn with_line(mut self, line: usize) -> Self {
        self.line = Some(line);
        self
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{} (line {}): {}", self.code, line, self.message),
            None => write!(f, "{}: {}", self.code, self.message),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
