"""Prompt templates for the three hierarchy levels.

The substep and step templates carry a ``{prediction_list}`` placeholder
for prior long-form predictions; the goal template carries
``{short_form_step}`` for the steps' short-form predictions. Lists are
serialized oldest first. Several lines carry significant trailing spaces;
the templates are checksum-pinned in the tests, so edit with care.
"""

from __future__ import annotations

from ..core import HierarchyLevel

GOAL_PROMPT = """I am planning to add annotations to a video. The annotations form a three-level hierarchy: goal, steps, and substeps. Here are the specific requirements:
1. Goal Annotation: There is only one goal annotation for the entire video.
2. Step Annotations: Each step annotation is ordered chronologically and must follow the completion of all substeps within the previous step. For example, Step 2 cannot begin until all substeps of Step 1 are completed.
3. Substep Annotations: These are specific parts of the video that detail the actions within each step.

Given an image sequence extracted from a video, predict the most appropriate goal for the video based on the frames from each step and the short form responses for each step. 
The short form responses of the steps are provided as a time-ordered list in text format, where the 0th index is the earliest step and higher indices represent more recent steps. 
Utilize this context to predict the overall goal of the video.

Generate a response:
The response should consist of a single sentence that succinctly describes the goal.
Use the following list of short form responses for each step (in text format and time-ordered):
Short form response of step: {short_form_step}

Output format must be:
Answer: (goal)"""

STEP_PROMPT = """I am planning to add annotations to a video. The annotations form a three-level hierarchy: goal, steps, and substeps. Here are the specific requirements:
1. Goal Annotation: There is only one goal annotation for the entire video.
2. Step Annotations: Each step annotation is ordered chronologically and must follow the completion of all substeps within the previous step. For example, Step 2 cannot begin until all substeps of Step 1 are completed.
3. Substep Annotations: These are specific parts of the video that detail the actions within each step.

Given an image sequence extracted from a video clip, predict the most appropriate step occurring in the clip based on the sequence and the previous steps. 
The previous steps are provided as a time-ordered list of long form responses in text format, where the 0th index is the earliest step and higher indices represent more recent steps.
If there are no previous steps, the list will be empty. If there are more than 10 previous steps, only the 10 most recent responses will be provided. Utilize this context to improve the prediction for the current step.

First, Generate two types of responses:
Short form response: A single sentence that succinctly describes the step.
Long form response: A detailed and accurate description of the step based on the image sequence, considering the previous steps if provided.

After generating the responses, revise the long form response to ensure it aligns with the short form response for consistency.

Use the following list of previous long form responses in text format to ensure continuity and logical progression (the list may be empty if there are no prior steps, and a maximum of the 10 most recent responses will be provided):
Previous long form response: {prediction_list}

Output format must be:
Answer:
short form response: (response)
long form response (before revision): (response)
long form response (after revision): (response)"""

SUBSTEP_PROMPT = """I am planning to add annotations to a video. The annotations form a three-level hierarchy: goal, steps, and substeps. Here are the specific requirements:
1. Goal Annotation: There is only one goal annotation for the entire video.
2. Step Annotations: Each step annotation is ordered chronologically and must follow the completion of all substeps within the previous step. For example, Step 2 cannot begin until all substeps of Step 1 are completed.
3. Substep Annotations: These are specific parts of the video that detail the actions within each step.

Given an image sequence extracted from a video clip, predict the most appropriate substep occurring in the clip based on the sequence and the previous substeps of the current step. 
The previous substeps are provided as a time-ordered list of long form responses in text format, where the 0th index is the earliest substep and higher indices represent more recent substeps.
If there are no previous substeps, the list will be empty. Utilize this context to improve the prediction for the current substep.

First, Generate two types of responses:
Short form response: A single sentence that succinctly describes the substep.
Long form response: A detailed and accurate description of the substep based on the image sequence, considering the previous substeps if provided.

After generating the responses, revise the long form response to ensure it aligns with the short form response for consistency.

Use the following list of previous long form responses in text format to ensure continuity and logical progression (the list may be empty if there are no prior substeps):
Previous long form response: {prediction_list}

Output format must be:
Answer:
short form response: (response)
long form response (before revision): (response)
long form response (after revision): (response)"""

TEMPLATES: dict[HierarchyLevel, str] = {
    HierarchyLevel.GOAL: GOAL_PROMPT,
    HierarchyLevel.STEP: STEP_PROMPT,
    HierarchyLevel.SUBSTEP: SUBSTEP_PROMPT,
}

PLACEHOLDERS: dict[HierarchyLevel, str] = {
    HierarchyLevel.GOAL: "{short_form_step}",
    HierarchyLevel.STEP: "{prediction_list}",
    HierarchyLevel.SUBSTEP: "{prediction_list}",
}
