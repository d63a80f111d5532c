//! Classification of Forms/PL/SQL builtins.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinClass {
    ModifyUi,
    ShowMessage,
    OpenView,
    Other,
}

const MODIFY_UI: &[&str] = &[
    "SET_ITEM_PROPERTY", "SET_WINDOW_PROPERTY", "SET_BLOCK_PROPERTY", "SET_CANVAS_PROPERTY",
    "SET_VIEW_PROPERTY", "SET_RADIO_BUTTON_PROPERTY", "SET_RECORD_PROPERTY", "SET_FORM_PROPERTY",
    "SET_LOV_PROPERTY", "SET_ALERT_PROPERTY", "CLEAR_ITEM", "CLEAR_BLOCK", "CLEAR_FORM",
    "CLEAR_RECORD", "GO_ITEM", "GO_BLOCK", "GO_RECORD", "SHOW_VIEW", "HIDE_VIEW", "HIDE_WINDOW",
    "NEXT_ITEM", "PREVIOUS_ITEM", "NEXT_RECORD", "PREVIOUS_RECORD", "FIRST_RECORD", "LAST_RECORD",
    "CREATE_RECORD", "DELETE_RECORD", "EXECUTE_QUERY", "ENTER_QUERY", "SYNCHRONIZE", "REDISPLAY",
    "SHOW_LOV", "DISPLAY_ITEM", "BELL",
];

const SHOW_MESSAGE: &[&str] = &["SHOW_ALERT"];

const OPEN_VIEW: &[&str] = &["SHOW_WINDOW", "CALL_FORM", "OPEN_FORM", "NEW_FORM", "GO_FORM"];

pub fn classify(name: &str) -> BuiltinClass {
    let upper = name.to_uppercase();
    let key = upper.as_str();
    if MODIFY_UI.contains(&key) {
        BuiltinClass::ModifyUi
    } else if SHOW_MESSAGE.contains(&key) {
        BuiltinClass::ShowMessage
    } else if OPEN_VIEW.contains(&key) {
        BuiltinClass::OpenView
    } else {
        BuiltinClass::Other
    }
}
