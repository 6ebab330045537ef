#![allow(dead_code)]

pub mod mock;

pub const STORES: &str = r#"[{
    "db_id": "stores",
    "table_names": ["customers", "store name", "orders"],
    "table_names_original": ["Customers", "StoreName", "Orders"],
    "column_names": [[-1, "*"], [0, "customer id"], [0, "name"], [1, "store id"], [1, "number of products"],
                     [2, "order id"], [2, "customer id"]],
    "column_names_original": [[-1, "*"], [0, "CustomerId"], [0, "Name"], [1, "StoreId"], [1, "NumProducts"],
                              [2, "OrderId"], [2, "CustomerId"]],
    "column_types": ["text", "number", "text", "number", "number", "number", "number"],
    "primary_keys": [1, 3, 5],
    "foreign_keys": [[6, 1]]
}]"#;
