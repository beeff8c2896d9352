# SPDX-License-Identifier: MIT

# Kept exactly as listed in the classification prompt, duplicate included.
CATEGORY_LABELS: tuple[str, ...] = (
    "Cybersecurity",
    "Artificial_Intelligence",
    "Commerce",
    "Advertising",
    "Payments",
    "News_Media",
    "Cryptography",
    "Devices",
    "Business",
    "eCommerce",
    "Logistics",
    "Finance",
    "Events",
    "Email",
    "Business_Software",
    "Music",
    "Database",
    "Translation",
    "Jobs",
    "Gaming",
    "Monitoring",
    "func_source_code",
    "Education",
    "Entertainment",
    "Visual_Recognition",
    "Sports",
    "SMS",
    "Media",
    "Search",
    "Finance",
    "Location",
    "Movies",
    "Transportation",
    "Text_Analysis",
    "Mapping",
    "Energy",
    "Customized",
    "Medical",
    "Storage",
    "Food",
    "Health",
    "Video_Images",
    "Science",
    "Communication",
    "Travel",
    "Social",
    "Data",
    "Reward",
    "Weather",
)

MISC_CATEGORY = "misc"
DEFAULT_TOOL_CLASS = "uncategorized"

CATEGORY_SET: frozenset[str] = frozenset(CATEGORY_LABELS) | {MISC_CATEGORY}
